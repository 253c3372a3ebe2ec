"""Raibert-heuristic foot targets and the foot-deviation penalty."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._util import as_vec, check_finite, rot2, wrap_angle
from .errors import InvalidInputError

# Feet are ordered front-left, front-right, rear-left, rear-right.
FOOT_NAMES = ("FL", "FR", "RL", "RR")
NOMINAL_HIPS = np.array([[0.19, 0.12], [0.19, -0.12], [-0.19, 0.12], [-0.19, -0.12]])
NEAR_THRESHOLD = 0.10  # m


@dataclass(frozen=True)
class GaitClock:
    phase: float = 0.0
    period: float = 0.5
    duty_factor: float = 0.5

    def __post_init__(self):
        if not (self.period > 0 and math.isfinite(self.period)):
            raise InvalidInputError(f"period must be positive, got {self.period}")
        if not 0.0 < self.duty_factor < 1.0:
            raise InvalidInputError(f"duty_factor must lie in (0, 1), got {self.duty_factor}")
        object.__setattr__(self, "phase", float(self.phase) % 1.0)

    @property
    def stance_duration(self) -> float:
        return self.period * self.duty_factor

    def advance(self, dt: float) -> GaitClock:
        return replace(self, phase=(self.phase + dt / self.period) % 1.0)


@dataclass(frozen=True)
class RobotState:
    body_position: np.ndarray = field(default_factory=lambda: np.zeros(2))
    body_yaw: float = 0.0
    body_velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))
    foot_positions: np.ndarray | None = None
    clock: GaitClock = field(default_factory=GaitClock)
    hips: np.ndarray = field(default_factory=lambda: NOMINAL_HIPS.copy())

    def __post_init__(self):
        object.__setattr__(self, "body_position", as_vec(self.body_position, 2, "body_position"))
        object.__setattr__(self, "body_velocity", as_vec(self.body_velocity, 2, "body_velocity"))
        object.__setattr__(self, "body_yaw", wrap_angle(check_finite(self.body_yaw, "body_yaw")))
        hips = np.asarray(self.hips, dtype=float)
        if hips.shape != (4, 2):
            raise InvalidInputError("hips must be a 4x2 array")
        object.__setattr__(self, "hips", hips)
        if self.foot_positions is None:
            feet = self.hip_projections()
        else:
            feet = np.asarray(self.foot_positions, dtype=float)
        if feet.shape != (4, 2):
            raise InvalidInputError(f"exactly four 2D foot positions required, got shape {feet.shape}")
        if not np.all(np.isfinite(feet)):
            raise InvalidInputError("foot positions must be finite")
        object.__setattr__(self, "foot_positions", feet)

    def hip_projections(self) -> np.ndarray:
        """World-frame positions of the four hips, shape (4, 2)."""
        return self.body_position + self.hips @ rot2(self.body_yaw).T


def raibert_target(robot: RobotState, v_ref, foot_index: int) -> np.ndarray:
    """Touchdown target: hip projection plus ``v_ref * T_stance / 2``."""
    if not (isinstance(foot_index, (int, np.integer)) and 0 <= foot_index <= 3):
        raise InvalidInputError(f"foot_index must be in 0..3, got {foot_index!r}")
    v = as_vec(v_ref, 2, "v_ref")
    hip = robot.body_position + rot2(robot.body_yaw) @ robot.hips[foot_index]
    return hip + v * (robot.clock.stance_duration / 2.0)


def raibert_targets(robot: RobotState, v_ref) -> np.ndarray:
    v = as_vec(v_ref, 2, "v_ref")
    return robot.hip_projections() + v * (robot.clock.stance_duration / 2.0)


def near_indicator(ball_position, foot_position, threshold: float = NEAR_THRESHOLD) -> bool:
    d = as_vec(ball_position, 2, "ball_position") - as_vec(foot_position, 2, "foot_position")
    return bool(math.hypot(d[0], d[1]) < threshold)


def feet_deviation(robot: RobotState, v_ref, ball_position) -> float:
    """Summed distance of each non-near foot from its Raibert target."""
    ball = as_vec(ball_position, 2, "ball_position")
    targets = raibert_targets(robot, v_ref)
    total = 0.0
    for foot, target in zip(robot.foot_positions, targets):
        if near_indicator(ball, foot):
            continue
        total += math.hypot(*(foot - target))
    return total
