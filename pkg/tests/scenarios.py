"""Scenario builders shared by the simulator and acceptance tests."""
from __future__ import annotations

import math

import numpy as np

from dribblekit.ball_dynamics import TerrainParams
from dribblekit.sim import (
    Controller,
    EventSwitches,
    ScenarioConfig,
    circle_command_script,
    dribble_and_stop_script,
    run_scenario,
)

FG = Controller.FEEDBACK_GUIDED
NAIVE = Controller.NAIVE_PURSUIT


def dribble_stop(controller: Controller, c_d: float, seed: int, **kw) -> ScenarioConfig:
    return ScenarioConfig(
        terrain=TerrainParams(c_d), controller=controller, command_script=dribble_and_stop_script(),
        duration=10.0, seed=seed, **kw,
    )


def circle_config(controller: Controller, c_d: float, seed: int, diameter: float = 5.0) -> ScenarioConfig:
    script = circle_command_script(diameter, 1.0)
    period = math.pi * diameter
    return ScenarioConfig(
        terrain=TerrainParams(c_d), controller=controller, command_script=script,
        duration=period, seed=seed, events=EventSwitches(perturbation=False),
    )


def circle_run(controller: Controller, c_d: float, seed: int, diameter: float = 5.0):
    """Returns (max deviation of the ball from the commanded circle, max ball-robot distance).

    The commanded path starts at the initial ball position heading +x and
    turns counter-clockwise, so its centre sits one radius to the left.
    """
    cfg = circle_config(controller, c_d, seed, diameter)
    res = run_scenario(cfg)
    ball = res.record.xy("ball_p")
    centre = ball[0] + (0.0, diameter / 2)
    dev = np.abs(np.hypot(*(ball - centre).T) - diameter / 2)
    return float(dev.max()), res.metrics.max_ball_dist
