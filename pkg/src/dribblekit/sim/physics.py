"""Planar body, foot and contact physics for the dribbling harness.

The hot loop in :mod:`runner` works on plain floats, so the kernels here take
and return floats and lists. The public ``body_step`` / ``contact_step``
wrap them with the package's dataclasses.

Foot model: a trot. Feet (FL, RR) and (FR, RL) alternate; a stance foot is
planted (zero velocity) and can block the ball, a swing foot is airborne and
flies to its Raibert touchdown target. A swing foot may instead *strike*:
once per swing it is placed just behind the ball along the desired change
of ball velocity and driven through it. Legs only kick forward, so a strike
is allowed only if that direction lies within a cone around the heading.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .._util import as_vec, check_finite, wrap_angle
from ..ball_dynamics import BallState
from ..errors import InvalidInputError
from ..gait import RobotState

TROT_PAIRS = ((0, 3), (1, 2))


@dataclass(frozen=True)
class BodyParams:
    tau: float = 0.2  # s, first-order velocity lag
    max_speed: float = 2.5  # m/s
    max_yaw_rate: float = 3.0  # rad/s
    yaw_deadzone: float = 0.10  # m, no turning when the ball is this close


@dataclass(frozen=True)
class ContactParams:
    radius: float = 0.11  # ball radius 0.09 + foot pad 0.02
    k_transfer: float = 0.8


@dataclass(frozen=True)
class StrikeParams:
    reach: float = 0.30  # m, hip to strike point
    min_gain: float = 0.05  # m/s, smallest velocity change worth a strike
    cone: float = 0.5  # cos of the widest strike angle from the heading
    standoff: float = 0.105  # m, foot-to-ball distance at strike start
    max_speed: float = 4.0  # m/s, foot speed cap
    once_per_swing: bool = False
    enabled: bool = True


def clamp_norm(x: float, y: float, limit: float) -> tuple[float, float]:
    n = math.hypot(x, y)
    if n > limit:
        return x * limit / n, y * limit / n
    return x, y


def lag_velocity(vx, vy, tx, ty, dt, params: BodyParams = BodyParams()) -> tuple[float, float]:
    tx, ty = clamp_norm(tx, ty, params.max_speed)
    a = dt / params.tau
    return vx + (tx - vx) * a, vy + (ty - vy) * a


def turn_toward(yaw, px, py, bx, by, dt, params: BodyParams = BodyParams()) -> float:
    if math.hypot(bx - px, by - py) <= params.yaw_deadzone:
        return yaw
    err = math.remainder(math.atan2(by - py, bx - px) - yaw, 2 * math.pi)
    lim = params.max_yaw_rate * dt
    return wrap_angle(yaw + max(-lim, min(lim, err)))


def swing_pair(phase: float) -> tuple[int, int]:
    return TROT_PAIRS[1] if phase < 0.5 else TROT_PAIRS[0]


def advance_feet(
    feet: list[list[float]],
    struck: list[bool],
    old_phase: float,
    phase: float,
    px: float,
    py: float,
    yaw: float,
    hips,
    vtx: float,
    vty: float,
    dt: float,
    stance_duration: float,
    strike_ctx: tuple | None = None,
    strike: StrikeParams = StrikeParams(),
    k_transfer: float = ContactParams.k_transfer,
) -> tuple[list[list[float]], list[list[float]], list[int]]:
    """Move the feet one step; returns (feet, foot velocities, contact-active indices).

    ``strike_ctx`` is ``(ball_px, ball_py, ball_vx, ball_vy, cmd_x, cmd_y)`` as
    the controller believes them, or None to disable strikes. ``struck`` is
    updated in place: it is cleared at the start of each swing.
    """
    pair = swing_pair(phase)
    if (old_phase < 0.5) != (phase < 0.5):
        for i in pair:
            struck[i] = False
    # time left until touchdown of the current swing half-cycle
    frac = (phase % 0.5) / 0.5
    remaining = max(dt, (1.0 - frac) * stance_duration)
    c, s = math.cos(yaw), math.sin(yaw)
    lead = stance_duration / 2.0
    new_feet = [list(f) for f in feet]
    vel = [[0.0, 0.0] for _ in range(4)]
    active: list[int] = []

    gx = gy = gm = 0.0
    if strike_ctx is not None and strike.enabled:
        bpx, bpy, bvx, bvy, cx, cy = strike_ctx
        gx, gy = cx - bvx, cy - bvy
        gm = math.hypot(gx, gy)

    for i in range(4):
        hx0, hy0 = hips[i][0], hips[i][1]
        hx = px + c * hx0 - s * hy0
        hy = py + s * hx0 + c * hy0
        if i not in pair:
            active.append(i)  # planted
            continue
        if not (struck[i] and strike.once_per_swing) and gm > strike.min_gain:
            ux, uy = gx / gm, gy / gm
            if ux * c + uy * s >= strike.cone:
                qx, qy = bpx - strike.standoff * ux, bpy - strike.standoff * uy
                if math.hypot(qx - hx, qy - hy) < strike.reach:
                    # foot speed that brings the ball's velocity along u to the command
                    sp = min(bvx * ux + bvy * uy + gm / k_transfer, strike.max_speed)
                    new_feet[i] = [qx, qy]
                    vel[i] = [sp * ux, sp * uy]
                    active.append(i)
                    continue
        tx, ty = hx + vtx * lead, hy + vty * lead
        fx, fy = feet[i]
        nx = fx + (tx - fx) * dt / remaining
        ny = fy + (ty - fy) * dt / remaining
        new_feet[i] = [nx, ny]
        vel[i] = [(nx - fx) / dt, (ny - fy) / dt]
    return new_feet, vel, active


def contact_impulse(
    bpx, bpy, bvx, bvy, feet, foot_vel, active, params: ContactParams = ContactParams()
) -> tuple[float, float, int]:
    """Velocity change from the single winning foot contact; index -1 if none."""
    best = None
    for i in active:
        fx, fy = feet[i]
        dx, dy = bpx - fx, bpy - fy
        dist = math.hypot(dx, dy)
        if not (0.0 < dist < params.radius):
            continue
        nx, ny = dx / dist, dy / dist
        rel = (foot_vel[i][0] - bvx) * nx + (foot_vel[i][1] - bvy) * ny
        if rel <= 0.0:
            continue  # receding
        if best is None or dist < best[0]:
            best = (dist, nx, ny, rel, i)
    if best is None:
        return 0.0, 0.0, -1
    _, nx, ny, rel, i = best
    k = params.k_transfer
    return k * rel * nx, k * rel * ny, i


def body_step(
    robot: RobotState,
    v_target,
    dt: float,
    ball_position=None,
    params: BodyParams = BodyParams(),
) -> RobotState:
    """One step of the simplified body: velocity lag, yaw toward the ball, gait.

    Without ``ball_position`` the yaw is held. Swing feet fly to their Raibert
    targets; strikes are not planned here.
    """
    dt = check_finite(dt, "dt")
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    vt = as_vec(v_target, 2, "v_target")
    vx, vy = lag_velocity(robot.body_velocity[0], robot.body_velocity[1], vt[0], vt[1], dt, params)
    px = robot.body_position[0] + vx * dt
    py = robot.body_position[1] + vy * dt
    yaw = robot.body_yaw
    if ball_position is not None:
        b = as_vec(ball_position, 2, "ball_position")
        yaw = turn_toward(yaw, robot.body_position[0], robot.body_position[1], b[0], b[1], dt, params)
    clock = robot.clock.advance(dt)
    feet, _, _ = advance_feet(
        robot.foot_positions.tolist(), [True] * 4, robot.clock.phase, clock.phase,
        px, py, yaw, robot.hips, vt[0], vt[1], dt, clock.stance_duration,
    )
    return replace(
        robot, body_position=np.array([px, py]), body_velocity=np.array([vx, vy]),
        body_yaw=yaw, clock=clock, foot_positions=np.array(feet),
    )


def contact_step(
    robot: RobotState,
    ball: BallState,
    foot_velocities=None,
    params: ContactParams = ContactParams(),
) -> BallState:
    """Apply at most one foot impulse to the ball.

    ``foot_velocities`` (4x2) defaults to zero, i.e. all feet planted.
    """
    fv = np.zeros((4, 2)) if foot_velocities is None else np.asarray(foot_velocities, float)
    if fv.shape != (4, 2):
        raise InvalidInputError(f"foot_velocities must be 4x2, got {fv.shape}")
    p, v = ball.position, ball.velocity
    dvx, dvy, _ = contact_impulse(
        p[0], p[1], v[0], v[1], robot.foot_positions.tolist(), fv.tolist(), range(4), params
    )
    return BallState(p.copy(), v + np.array([dvx, dvy]))
