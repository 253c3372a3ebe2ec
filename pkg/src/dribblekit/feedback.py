"""PI-plus-command feedback block producing a reference body velocity.

The reference is::

    v_ref = k_p (v_ball - v_robot) + k_i * integral + k_cmd (v_ball - cmd)

where ``integral`` accumulates ``v_ball - v_robot`` over time. Because the
command enters with a negative sign and the ball velocity with a positive
one, the reference runs ahead of the ball when asked to stop it, which is
what lets the robot overtake and block a coasting ball.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ._util import as_vec, check_finite
from .errors import InvalidInputError

INTEGRAL_CLAMP = 0.5  # m, per axis


@dataclass(frozen=True)
class FeedbackGains:
    k_p: float = 0.5
    k_i: float = 4.0
    k_cmd: float = 1.0


@dataclass(frozen=True)
class FeedbackState:
    integral: np.ndarray = field(default_factory=lambda: np.zeros(2))
    gains: FeedbackGains = field(default_factory=FeedbackGains)
    integral_clamp: float = INTEGRAL_CLAMP

    def __post_init__(self):
        object.__setattr__(self, "integral", as_vec(self.integral, 2, "integral"))
        if not self.integral_clamp >= 0:
            raise InvalidInputError("integral_clamp must be non-negative")


def accumulate(state: FeedbackState, ball_vel, robot_vel, dt: float) -> FeedbackState:
    """Forward-Euler update of the integral term with a per-axis clamp."""
    dt = check_finite(dt, "dt")
    if dt < 0:
        raise InvalidInputError(f"dt must be non-negative, got {dt}")
    diff = as_vec(ball_vel, 2, "ball_vel") - as_vec(robot_vel, 2, "robot_vel")
    lim = state.integral_clamp
    return replace(state, integral=np.clip(state.integral + diff * dt, -lim, lim))


def compute_reference(state: FeedbackState, ball_vel, robot_vel, cmd) -> np.ndarray:
    """Reference body velocity in the world frame."""
    g = state.gains
    vb = as_vec(ball_vel, 2, "ball_vel")
    vr = as_vec(robot_vel, 2, "robot_vel")
    c = as_vec(cmd, 2, "cmd")
    return g.k_p * (vb - vr) + g.k_i * state.integral + g.k_cmd * (vb - c)
