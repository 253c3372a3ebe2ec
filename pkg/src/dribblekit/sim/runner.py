"""Closed-loop scenario runner, trajectory records and metrics.

Per step: perceive -> controller -> body_step -> contact -> ball flow, with
rewards recorded for the state at the start of the step. The loop keeps its
state in plain floats; dataclass views are built only at the end.
"""
from __future__ import annotations

import csv
import io
import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import ball_filter as bf
from ..ball_dynamics import BallState, flow_coefficients
from ..errors import CannotInitializeError, InvalidInputError, SimulationDivergedError
from ..feedback import FeedbackGains, FeedbackState, INTEGRAL_CLAMP
from ..gait import NEAR_THRESHOLD, NOMINAL_HIPS, GaitClock, RobotState
from ..rewards import RewardParams
from .config import Controller, PerceptionMode, ScenarioConfig
from .controllers import GuidedParams, guided_target_xy, naive_target_xy
from .physics import (
    BodyParams,
    ContactParams,
    StrikeParams,
    advance_feet,
    contact_impulse,
    lag_velocity,
    swing_pair,
    turn_toward,
)
from .randomization import event_time, sample_randomization
from .sensing import SyntheticCameras

COLUMNS = (
    "t", "ball_px", "ball_py", "ball_vx", "ball_vy", "robot_px", "robot_py", "robot_yaw",
    "cmd_x", "cmd_y", "vref_x", "vref_y", "est_px", "est_py", "est_vx", "est_vy",
    "reward_base", "reward_shaped",
)
_COL = {name: i for i, name in enumerate(COLUMNS)}

FAIL_DISTANCE = 0.5  # m
STOP_SPEED = 0.05  # m/s
STOP_HOLD = 1.0  # s


@dataclass(frozen=True)
class TrajectoryRecord:
    rows: np.ndarray  # (n, len(COLUMNS))

    def __len__(self) -> int:
        return self.rows.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, _COL[name]]

    def xy(self, prefix: str) -> np.ndarray:
        """Two columns, e.g. ``xy("ball_v")`` -> (n, 2) ball velocities."""
        return self.rows[:, [_COL[prefix + "x"], _COL[prefix + "y"]]]


@dataclass(frozen=True)
class Metrics:
    ate: float
    success: bool
    time_to_stop: float | None
    max_ball_dist: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "ate": self.ate,
            "success": self.success,
            "time_to_stop": self.time_to_stop,
            "max_ball_dist": self.max_ball_dist,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class WorldState:
    ball: BallState
    robot: RobotState
    feedback: FeedbackState
    filter: bf.FilterState | None
    time: float


@dataclass(frozen=True)
class ScenarioResult:
    record: TrajectoryRecord
    metrics: Metrics
    final: WorldState
    strikes: int  # foot impulses delivered by swing feet


def ate(record: TrajectoryRecord) -> float:
    """Mean over rows of |ball velocity - command|."""
    if len(record) == 0:
        raise InvalidInputError("empty trajectory record")
    err = record.xy("ball_v") - record.xy("cmd_")
    return float(np.mean(np.hypot(err[:, 0], err[:, 1])))


def time_to_stop(record: TrajectoryRecord, stop_time: float | None, dt: float) -> float | None:
    """First time at or after ``stop_time`` from which ball speed stays below 0.05 m/s for 1 s."""
    if stop_time is None:
        return None
    t = record.column("t")
    v = record.xy("ball_v")
    slow = np.hypot(v[:, 0], v[:, 1]) < STOP_SPEED
    need = int(round(STOP_HOLD / dt))
    run = 0
    for k in range(len(t) - 1, -1, -1):
        run = run + 1 if slow[k] else 0
        slow[k] = run > need  # reuse: "slow for the next 1 s inclusive"
    idx = np.nonzero(slow & (t >= stop_time - 1e-9))[0]
    return float(t[idx[0]]) if idx.size else None


def _stop_time(script) -> float | None:
    """Start of the final zero command following a non-zero one, if any."""
    if not script or any(script[-1][1]):
        return None
    t_stop = script[-1][0]
    for t, c in reversed(script):
        if any(c):
            return t_stop
        t_stop = t
    return None


def _cmd_lookup(script):
    times = [t for t, _ in script]
    cmds = [tuple(map(float, c)) for _, c in script]

    def at(t: float) -> tuple[float, float]:
        i = bisect_right(times, t + 1e-9) - 1
        return (0.0, 0.0) if i < 0 else cmds[i]

    return at


def run_scenario(
    config: ScenarioConfig,
    guided: GuidedParams = GuidedParams(),
    body: BodyParams = BodyParams(),
    contact: ContactParams = ContactParams(),
    strike: StrikeParams = StrikeParams(),
    rewards: RewardParams = RewardParams(),
    gains: FeedbackGains = FeedbackGains(),
) -> ScenarioResult:
    cfg = config
    dt = cfg.dt
    n = int(math.floor(cfg.duration / dt + 1e-9))
    sample = sample_randomization(cfg.ranges, cfg.seed)
    ev = cfg.events
    terrain = sample.terrain if ev.terrain else cfg.terrain
    c_d = terrain.drag_coefficient
    decay, reach = flow_coefficients(c_d, dt)

    bpx = cfg.ball_position[0] + sample.initial_offset[0] * ev.initial_jitter[0]
    bpy = cfg.ball_position[1] + sample.initial_offset[1] * ev.initial_jitter[1]
    bvx, bvy = map(float, cfg.ball_velocity)
    rpx, rpy = map(float, cfg.robot_position)
    rvx = rvy = 0.0
    yaw = float(cfg.robot_yaw)
    ix = iy = 0.0
    clock = GaitClock()
    phase, period, stance = clock.phase, clock.period, clock.stance_duration
    hips = NOMINAL_HIPS.tolist()
    c0, s0 = math.cos(yaw), math.sin(yaw)
    feet = [[rpx + c0 * hx - s0 * hy, rpy + s0 * hx + c0 * hy] for hx, hy in hips]
    struck = [False] * 4
    strikes = 0

    k_pert = int(round(event_time(sample.perturbation_time, cfg.duration) / dt)) if ev.perturbation else -1
    k_tele = int(round(event_time(sample.teleport_time, cfg.duration) / dt)) if ev.teleport else -1

    cmd_at = _cmd_lookup(cfg.command_script)
    ctrl = cfg.controller
    kp, ki, kc = gains.k_p, gains.k_i, gains.k_cmd
    lim = INTEGRAL_CLAMP

    cams = None
    fstate = None
    if cfg.perception_mode is PerceptionMode.SYNTHETIC_CAMERAS:
        rate = sample.arrival_rate if ev.arrival_rate else cfg.sensors.arrival_rate
        cams = SyntheticCameras(
            rng=np.random.default_rng([cfg.seed, 1]), arrival_rate=rate,
            pixel_noise=cfg.sensors.pixel_noise, velocity_noise=cfg.sensors.velocity_noise,
            body_height=cfg.sensors.body_height,
        )

    sig_t, sig_p, sig = rewards.sigma_task, rewards.sigma_prox, rewards.sigma
    w_p, w_f = rewards.w_proximity, rewards.w_facing
    lead = stance / 2.0

    rows = np.empty((n + 1, len(COLUMNS)))
    max_d = 0.0
    k = 0
    try:
        for k in range(n + 1):
            t = k * dt
            if k == k_pert:
                bvx += sample.perturbation_velocity[0]
                bvy += sample.perturbation_velocity[1]
            if k == k_tele:
                bpx += sample.teleport_offset[0]
                bpy += sample.teleport_offset[1]
            if not all(map(math.isfinite, (bpx, bpy, bvx, bvy, rpx, rpy, rvx, rvy, yaw))):
                raise SimulationDivergedError(k)
            cx, cy = cmd_at(t)

            # perception
            if cams is None:
                epx, epy, evx, evy = bpx, bpy, bvx, bvy
            else:
                meas, boxes = cams.measure((bpx, bpy), (bvx, bvy), (rpx, rpy), yaw)
                if fstate is None:
                    try:
                        fstate = bf.init(boxes, cams.cams, cams.ball_diameter, (rpx, rpy), yaw)
                    except CannotInitializeError:
                        pass
                else:
                    fstate = bf.step(fstate, dt, meas)
                if fstate is None:
                    epx, epy, evx, evy = rpx, rpy, 0.0, 0.0  # nothing seen yet: stand still
                else:
                    epx, epy, evx, evy = (float(v) for v in fstate.x)

            # feedback reference (integral first, then reference)
            ix = min(lim, max(-lim, ix + (evx - rvx) * dt))
            iy = min(lim, max(-lim, iy + (evy - rvy) * dt))
            vrx = kp * (evx - rvx) + ki * ix + kc * (evx - cx)
            vry = kp * (evy - rvy) + ki * iy + kc * (evy - cy)

            # rewards on the true state
            dx, dy = bpx - rpx, bpy - rpy
            dist = math.hypot(dx, dy)
            max_d = max(max_d, dist)
            task = math.exp(-((bvx - cx) ** 2 + (bvy - cy) ** 2) / sig_t)
            prox = math.exp(-dist * dist / sig_p)
            facing = 1.0 if dist == 0.0 else max(0.0, (math.cos(yaw) * dx + math.sin(yaw) * dy) / dist)
            base = task + w_p * prox + w_f * facing
            cy_, sy_ = math.cos(yaw), math.sin(yaw)
            dp = 0.0
            for i in range(4):
                fx, fy = feet[i]
                if math.hypot(bpx - fx, bpy - fy) < NEAR_THRESHOLD:
                    continue
                hx0, hy0 = hips[i]
                tx = rpx + cy_ * hx0 - sy_ * hy0 + vrx * lead
                ty = rpy + sy_ * hx0 + cy_ * hy0 + vry * lead
                dp += math.hypot(fx - tx, fy - ty)
            shaped = math.exp(-dp / sig) * (base + math.exp(-math.hypot(rvx - vrx, rvy - vry)))

            rows[k] = (t, bpx, bpy, bvx, bvy, rpx, rpy, yaw, cx, cy, vrx, vry, epx, epy, evx, evy, base, shaped)
            if k == n:
                break

            # controller
            if ctrl is Controller.FEEDBACK_GUIDED:
                vtx, vty = guided_target_xy(rpx, rpy, epx, epy, evx, evy, cx, cy, vrx, vry, guided)
            elif ctrl is Controller.NAIVE_PURSUIT:
                vtx, vty = naive_target_xy(rpx, rpy, epx, epy, cx, cy)
            else:
                vtx = vty = 0.0

            # body
            rvx, rvy = lag_velocity(rvx, rvy, vtx, vty, dt, body)
            ox, oy = rpx, rpy
            rpx += rvx * dt
            rpy += rvy * dt
            if ctrl is not Controller.IDLE:
                yaw = turn_toward(yaw, ox, oy, epx, epy, dt, body)
            old_phase = phase
            phase = (phase + dt / period) % 1.0
            ctx = None if ctrl is Controller.IDLE else (epx, epy, evx, evy, cx, cy)
            feet, fvel, active = advance_feet(
                feet, struck, old_phase, phase, rpx, rpy, yaw, hips, vtx, vty, dt, stance, ctx, strike,
                contact.k_transfer,
            )

            # contact, then ball flow
            dvx, dvy, hit = contact_impulse(bpx, bpy, bvx, bvy, feet, fvel, active, contact)
            if hit >= 0:
                bvx += dvx
                bvy += dvy
                if hit in swing_pair(phase):
                    struck[hit] = True
                    strikes += 1
            bpx += reach * bvx
            bpy += reach * bvy
            bvx *= decay
            bvy *= decay
    except OverflowError:
        # finite but huge states overflow before the finiteness check sees them
        raise SimulationDivergedError(k) from None

    record = TrajectoryRecord(rows)
    metrics = Metrics(
        ate=ate(record),
        success=bool(max_d <= FAIL_DISTANCE),
        time_to_stop=time_to_stop(record, _stop_time(cfg.command_script), dt),
        max_ball_dist=float(max_d),
        seed=int(cfg.seed),
    )
    final = WorldState(
        ball=BallState(np.array([bpx, bpy]), np.array([bvx, bvy])),
        robot=RobotState(
            body_position=np.array([rpx, rpy]), body_yaw=yaw, body_velocity=np.array([rvx, rvy]),
            foot_positions=np.array(feet), clock=GaitClock(phase, period, clock.duty_factor),
        ),
        feedback=FeedbackState(np.array([ix, iy]), gains),
        filter=fstate,
        time=n * dt,
    )
    return ScenarioResult(record, metrics, final, strikes)


def record_to_csv(record: TrajectoryRecord) -> str:
    """CSV text with a header row; floats use ``repr`` so values round-trip exactly."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in record.rows.tolist():
        w.writerow([repr(v) for v in row])
    return buf.getvalue()


def write_outputs(result: ScenarioResult, out_dir: str | Path, stem: str = "trajectory") -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    json_path = out / "metrics.json" if stem == "trajectory" else out / f"{stem}_metrics.json"
    csv_path.write_text(record_to_csv(result.record))
    json_path.write_text(json.dumps(result.metrics.to_dict(), indent=2) + "\n")
    return csv_path, json_path
