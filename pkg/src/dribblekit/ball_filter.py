"""Constant-velocity Kalman filter fusing masked multi-source ball measurements.

State ``x = [px, py, vx, vy]``. The measurement vector stacks four position
readings (viewing-angle and projection-intersection models on two cameras)
and one velocity reading. Absent slots are dropped from ``H`` and ``R``
before the update, so any subset of sources can be fused.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._util import as_vec, check_finite
from .errors import CannotInitializeError, FilterDegenerateError, InvalidInputError
from .perception import BALL_DIAMETER, BoundingBox, CameraModel, viewing_angle_position

SLOTS = ("pos_angle_cam1", "pos_angle_cam2", "pos_center_cam1", "pos_center_cam2", "vel_estimate")
POSITION_SLOTS = SLOTS[:4]

_I2 = np.eye(2)
_O2 = np.zeros((2, 2))
H_FULL = np.block([[_I2, _O2]] * 4 + [[_O2, _I2]])  # 10x4

P0_SCALE = 0.01


def default_q() -> np.ndarray:
    return np.diag([0.01, 0.01, 0.2, 0.2])


def default_r() -> np.ndarray:
    return np.diag([0.01] * 8 + [0.1, 0.1])


@dataclass(frozen=True)
class NoiseConfig:
    Q: np.ndarray = field(default_factory=default_q)
    R: np.ndarray = field(default_factory=default_r)

    def __post_init__(self):
        q = np.asarray(self.Q, dtype=float)
        r = np.asarray(self.R, dtype=float)
        if q.shape != (4, 4) or r.shape != (10, 10):
            raise InvalidInputError(f"Q must be 4x4 and R 10x10, got {q.shape} and {r.shape}")
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "R", r)

    @classmethod
    def from_diagonals(cls, q_diag: Sequence[float], r_diag: Sequence[float]) -> NoiseConfig:
        return cls(np.diag(np.asarray(q_diag, float)), np.diag(np.asarray(r_diag, float)))


@dataclass(frozen=True)
class FilterState:
    x: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", as_vec(self.x, 4, "x"))
        p = np.asarray(self.P, dtype=float)
        if p.shape != (4, 4):
            raise InvalidInputError(f"P must be 4x4, got {p.shape}")
        object.__setattr__(self, "P", p)

    @property
    def position(self) -> np.ndarray:
        return self.x[:2]

    @property
    def velocity(self) -> np.ndarray:
        return self.x[2:]


@dataclass
class MeasurementSet:
    """Up to five 2-vector readings; a slot set to None is unavailable."""

    pos_angle_cam1: np.ndarray | None = None
    pos_angle_cam2: np.ndarray | None = None
    pos_center_cam1: np.ndarray | None = None
    pos_center_cam2: np.ndarray | None = None
    vel_estimate: np.ndarray | None = None

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> MeasurementSet:
        unknown = set(values) - set(SLOTS)
        if unknown:
            raise InvalidInputError(f"unknown measurement slots {sorted(unknown)}")
        return cls(**{k: None if v is None else as_vec(v, 2, k) for k, v in values.items()})

    def available(self) -> list[bool]:
        return [getattr(self, s) is not None for s in SLOTS]

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (row indices into the 10-vector, stacked measurement values)."""
        rows: list[int] = []
        vals: list[float] = []
        for i, name in enumerate(SLOTS):
            v = getattr(self, name)
            if v is None:
                continue
            v = as_vec(v, 2, name)
            rows += [2 * i, 2 * i + 1]
            vals += [v[0], v[1]]
        return np.array(rows, dtype=int), np.array(vals)


def transition(dt: float) -> np.ndarray:
    f = np.eye(4)
    f[0, 2] = f[1, 3] = dt
    return f


def init(
    boxes: Sequence[BoundingBox | None],
    cams: Sequence[CameraModel],
    ball_diameter: float = BALL_DIAMETER,
    body_position=(0.0, 0.0),
    body_yaw: float = 0.0,
) -> FilterState:
    """Initial state from the most confident detection via the viewing-angle model.

    The position is mapped from the body frame to the world frame with the
    given planar body pose; velocity starts at zero and ``P = 0.01 I``.
    """
    candidates = [(b.confidence, -i, b, c) for i, (b, c) in enumerate(zip(boxes, cams)) if b is not None]
    if not candidates:
        raise CannotInitializeError("no detection available to initialise the filter")
    _, _, box, cam = max(candidates, key=lambda t: (t[0], t[1]))
    rel = viewing_angle_position(box, cam, ball_diameter)[:2]
    c, s = np.cos(body_yaw), np.sin(body_yaw)
    pos = as_vec(body_position, 2, "body_position") + np.array([c * rel[0] - s * rel[1], s * rel[0] + c * rel[1]])
    return FilterState(np.concatenate([pos, np.zeros(2)]), P0_SCALE * np.eye(4))


def predict(state: FilterState, dt: float, noise: NoiseConfig = NoiseConfig()) -> FilterState:
    dt = check_finite(dt, "dt")
    if dt < 0:
        raise InvalidInputError(f"dt must be non-negative, got {dt}")
    f = transition(dt)
    p = f @ state.P @ f.T + noise.Q
    return FilterState(f @ state.x, 0.5 * (p + p.T))


def update(state: FilterState, meas: MeasurementSet, noise: NoiseConfig = NoiseConfig()) -> FilterState:
    """Masked Kalman update with a Joseph-form covariance."""
    rows, z = meas.stacked()
    if rows.size == 0:
        return state
    h = H_FULL[rows]
    r = noise.R[np.ix_(rows, rows)]
    s = h @ state.P @ h.T + r
    if not np.all(np.isfinite(s)) or np.linalg.cond(s) > 1e14:
        raise FilterDegenerateError("innovation covariance is numerically singular")
    # K = P H^T S^-1, solved rather than inverted
    k = np.linalg.solve(s, h @ state.P).T
    x = state.x + k @ (z - h @ state.x)
    a = np.eye(4) - k @ h
    p = a @ state.P @ a.T + k @ r @ k.T
    return FilterState(x, 0.5 * (p + p.T))


def step(state: FilterState, dt: float, meas: MeasurementSet, noise: NoiseConfig = NoiseConfig()) -> FilterState:
    return update(predict(state, dt, noise), meas, noise)
