"""Ball rolling on a surface under velocity-proportional drag.

The ball obeys ``a = -c_d * v`` per axis. The system is linear, so
:func:`step` uses the exact exponential flow rather than a numerical
integrator.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._util import as_vec, check_finite
from .errors import InvalidInputError

# Below this |c_d| the position update switches to the zero-drag limit.
ZERO_DRAG_EPS = 1e-9


class StabilityClass(enum.Enum):
    STABLE = "Stable"
    MARGINAL = "Marginal"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class BallState:
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec(self.position, 2, "position"))
        object.__setattr__(self, "velocity", as_vec(self.velocity, 2, "velocity"))

    @property
    def speed(self) -> float:
        return float(np.hypot(*self.velocity))


@dataclass(frozen=True)
class TerrainParams:
    drag_coefficient: float = 0.2
    ball_mass: float = 0.3

    def __post_init__(self):
        check_finite(self.drag_coefficient, "drag_coefficient")
        if not (math.isfinite(self.ball_mass) and self.ball_mass > 0):
            raise InvalidInputError(f"ball_mass must be positive, got {self.ball_mass}")


def drag_accel(velocity, c_d: float) -> np.ndarray:
    """Acceleration from rolling drag: ``-c_d * velocity``."""
    v = as_vec(velocity, 2, "velocity")
    c_d = check_finite(c_d, "c_d")
    return -c_d * v


def flow_coefficients(c_d: float, dt: float) -> tuple[float, float]:
    """Return ``(decay, reach)`` such that v' = decay*v and p' = p + reach*v."""
    if abs(c_d) < ZERO_DRAG_EPS:
        return 1.0, dt
    decay = math.exp(-c_d * dt)
    # expm1 keeps (1 - e^{-x}) / c_d accurate for small x
    reach = -math.expm1(-c_d * dt) / c_d
    return decay, reach


def step(state: BallState, c_d: float, dt: float) -> BallState:
    """Advance the ball by ``dt`` seconds along the exact flow."""
    c_d = check_finite(c_d, "c_d")
    dt = check_finite(dt, "dt")
    if dt < 0:
        raise InvalidInputError(f"dt must be non-negative, got {dt}")
    decay, reach = flow_coefficients(c_d, dt)
    return BallState(state.position + reach * state.velocity, decay * state.velocity)


def system_matrix(c_d: float) -> np.ndarray:
    """Per-axis state matrix of d/dt [p, v] = A [p, v]."""
    return np.array([[0.0, 1.0], [0.0, -c_d]])


def eigenvalues(c_d: float) -> tuple[float, float]:
    c_d = check_finite(c_d, "c_d")
    # upper-triangular, so the diagonal is the spectrum; +0.0 drops the -0 sign
    return 0.0, -c_d + 0.0


def classify_stability(c_d: float) -> StabilityClass:
    c_d = check_finite(c_d, "c_d")
    if c_d > 0:
        return StabilityClass.STABLE
    if c_d < 0:
        return StabilityClass.UNSTABLE
    return StabilityClass.MARGINAL
