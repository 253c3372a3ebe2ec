"""Scripted body-velocity controllers.

``NaivePursuit`` chases the ball: ``cmd + k (ball - robot)``. It never
outruns a coasting ball, so once asked to stop it can only trail it.

``FeedbackGuided`` blends two modes by how much the ball must be slowed
along its own direction of travel:

* push: hold a station behind the ball, on the side opposite the wanted
  velocity change, and move with the command;
* brake: follow the feedback reference plus a pull toward a station ahead of
  the ball. This is the deliberate overshoot: the robot runs past the ball
  so that it can turn and block it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._util import as_vec
from ..ball_dynamics import BallState
from ..gait import RobotState
from .physics import clamp_norm

K_PURSUIT = 1.0  # 1/s
MAX_SPEED = 2.5  # m/s


@dataclass(frozen=True)
class GuidedParams:
    push_offset: float = 0.35  # m, station distance behind the ball
    push_gain: float = 2.0  # 1/s
    error_gain: float = 4.0  # weight of (cmd - v_ball) in the push direction
    brake_offset: float = 0.35  # m, station distance ahead of the ball
    brake_gain: float = 12.0  # 1/s, must beat the integral term of the reference
    brake_scale: float = 0.3  # m/s of excess ball speed for full braking


def naive_pursuit_target(robot: RobotState, ball: BallState, cmd, k: float = K_PURSUIT,
                         max_speed: float = MAX_SPEED) -> np.ndarray:
    c = as_vec(cmd, 2, "cmd")
    v = c + k * (ball.position - robot.body_position)
    return np.array(clamp_norm(v[0], v[1], max_speed))


def naive_target_xy(rpx, rpy, bpx, bpy, cx, cy, k: float = K_PURSUIT) -> tuple[float, float]:
    return cx + k * (bpx - rpx), cy + k * (bpy - rpy)


def guided_target_xy(rpx, rpy, bpx, bpy, bvx, bvy, cx, cy, vrx, vry,
                     p: GuidedParams = GuidedParams()) -> tuple[float, float]:
    """Body-velocity target of the feedback-guided controller (unclamped)."""
    # push station: behind the ball w.r.t. cmd + error_gain * (cmd - v_ball)
    gx = cx + p.error_gain * (cx - bvx)
    gy = cy + p.error_gain * (cy - bvy)
    gm = math.hypot(gx, gy)
    if math.hypot(cx, cy) > 0.05 and gm > 1e-6:
        ux, uy = gx / gm, gy / gm
    else:
        # idle command: approach the ball from where we are
        d = max(1e-9, math.hypot(bpx - rpx, bpy - rpy))
        ux, uy = (bpx - rpx) / d, (bpy - rpy) / d
    push_x = cx + p.push_gain * (bpx - p.push_offset * ux - rpx)
    push_y = cy + p.push_gain * (bpy - p.push_offset * uy - rpy)

    sb = math.hypot(bvx, bvy)
    if sb <= 1e-6:
        return push_x, push_y
    excess = ((bvx - cx) * bvx + (bvy - cy) * bvy) / sb
    lam = min(1.0, max(0.0, excess / p.brake_scale))
    if lam == 0.0:
        return push_x, push_y
    brake_x = vrx + p.brake_gain * (bpx + p.brake_offset * bvx / sb - rpx)
    brake_y = vry + p.brake_gain * (bpy + p.brake_offset * bvy / sb - rpy)
    return (1 - lam) * push_x + lam * brake_x, (1 - lam) * push_y + lam * brake_y
