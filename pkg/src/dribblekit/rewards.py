"""Base dribbling rewards and the guidance-shaping transform.

The base terms (velocity tracking, proximity, facing) use Gaussian-style
kernels whose widths are configurable. ``shape_reward`` gates the base
reward by foot-placement deviation and adds a bonus for tracking the
feedback reference velocity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import as_vec, check_finite
from .errors import InvalidInputError


@dataclass(frozen=True)
class RewardParams:
    sigma_task: float = 0.25
    sigma_prox: float = 1.0
    sigma: float = 0.02  # foot-deviation gate width, m
    w_proximity: float = 0.3
    w_facing: float = 0.3


@dataclass(frozen=True)
class RewardBreakdown:
    task: float
    proximity: float
    facing: float
    base_total: float
    shaped_total: float


def _sqnorm(a: np.ndarray) -> float:
    return float(a[0] * a[0] + a[1] * a[1])


def task_reward(ball_vel, cmd, sigma_task: float = 0.25) -> float:
    err = as_vec(ball_vel, 2, "ball_vel") - as_vec(cmd, 2, "cmd")
    return math.exp(-_sqnorm(err) / sigma_task)


def proximity_reward(robot_pos, ball_pos, sigma_prox: float = 1.0) -> float:
    d = as_vec(robot_pos, 2, "robot_pos") - as_vec(ball_pos, 2, "ball_pos")
    return math.exp(-_sqnorm(d) / sigma_prox)


def facing_reward(body_yaw: float, robot_pos, ball_pos) -> float:
    """Clamped cosine between the body heading and the bearing to the ball."""
    yaw = check_finite(body_yaw, "body_yaw")
    d = as_vec(ball_pos, 2, "ball_pos") - as_vec(robot_pos, 2, "robot_pos")
    dist = math.hypot(d[0], d[1])
    if dist == 0.0:
        raise InvalidInputError("facing is undefined when robot and ball coincide")
    cos_angle = (math.cos(yaw) * d[0] + math.sin(yaw) * d[1]) / dist
    return max(0.0, min(1.0, cos_angle))


def base_reward(task: float, proximity: float, facing: float, params: RewardParams = RewardParams()) -> float:
    return task + params.w_proximity * proximity + params.w_facing * facing


def shape_reward(base: float, body_vel, v_ref, dp_feet: float, sigma: float = 0.02) -> float:
    """``exp(-dp_feet / sigma) * (base + exp(-|body_vel - v_ref|))``."""
    dp_feet = check_finite(dp_feet, "dp_feet")
    if dp_feet < 0:
        raise InvalidInputError(f"dp_feet must be non-negative, got {dp_feet}")
    err = as_vec(body_vel, 2, "body_vel") - as_vec(v_ref, 2, "v_ref")
    return math.exp(-dp_feet / sigma) * (float(base) + math.exp(-math.hypot(err[0], err[1])))


def evaluate(
    *,
    ball_pos,
    ball_vel,
    cmd,
    robot_pos,
    body_yaw: float,
    body_vel,
    v_ref,
    dp_feet: float,
    params: RewardParams = RewardParams(),
) -> RewardBreakdown:
    task = task_reward(ball_vel, cmd, params.sigma_task)
    prox = proximity_reward(robot_pos, ball_pos, params.sigma_prox)
    if np.array_equal(np.asarray(robot_pos, float), np.asarray(ball_pos, float)):
        # bearing undefined; the ball is as "faced" as it can be
        facing = 1.0
    else:
        facing = facing_reward(body_yaw, robot_pos, ball_pos)
    base = base_reward(task, prox, facing, params)
    shaped = shape_reward(base, body_vel, v_ref, dp_feet, params.sigma)
    return RewardBreakdown(task, prox, facing, base, shaped)
