"""Per-episode domain randomization and command scripts."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from ..ball_dynamics import TerrainParams
from ..errors import InvalidInputError
from .config import RandomizationRanges

# Both one-shot events fire in this window, measured from the episode start
# and the episode end respectively.
EVENT_MARGIN_START = 1.0  # s
EVENT_MARGIN_END = 2.0  # s


@dataclass(frozen=True)
class RandomizationSample:
    terrain: TerrainParams
    perturbation_time: float  # fraction of the event window, in [0, 1)
    perturbation_velocity: tuple[float, float]
    teleport_time: float  # fraction of the event window
    teleport_offset: tuple[float, float]
    arrival_rate: float
    command: tuple[float, float]
    initial_offset: tuple[float, float]  # unit-square sample, scaled by the jitter


def _uniform(rng: np.random.Generator, name: str, bounds) -> float:
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise InvalidInputError(f"empty or invalid range for {name}: [{lo}, {hi}]")
    if hi == lo:
        rng.random()  # keep the stream aligned
        return lo
    return float(rng.uniform(lo, hi))


def sample_randomization(ranges: RandomizationRanges, seed: int) -> RandomizationSample:
    """Draw one episode's randomized parameters; deterministic in ``seed``.

    Every field is drawn in a fixed order whether or not the run uses it, so
    switching an effect on or off does not shift the other draws.
    """
    for f in fields(RandomizationRanges):
        lo, hi = getattr(ranges, f.name)
        if hi < lo:
            raise InvalidInputError(f"empty range for {f.name}: [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    c_d = _uniform(rng, "drag_coefficient", ranges.drag_coefficient)
    mass = _uniform(rng, "ball_mass", ranges.ball_mass)
    pert_speed = _uniform(rng, "perturbation_velocity", ranges.perturbation_velocity)
    pert_dir = rng.uniform(0.0, 2 * math.pi)
    pert_time = rng.random()
    tele = _uniform(rng, "teleport_distance", ranges.teleport_distance)
    tele_dir = rng.uniform(0.0, 2 * math.pi)
    tele_time = rng.random()
    rate = _uniform(rng, "arrival_rate", ranges.arrival_rate)
    cmd = (_uniform(rng, "command", ranges.command), _uniform(rng, "command", ranges.command))
    off = (float(rng.uniform(-1.0, 1.0)), float(rng.uniform(-1.0, 1.0)))
    return RandomizationSample(
        terrain=TerrainParams(c_d, mass),
        perturbation_time=float(pert_time),
        perturbation_velocity=(pert_speed * math.cos(pert_dir), pert_speed * math.sin(pert_dir)),
        teleport_time=float(tele_time),
        teleport_offset=(tele * math.cos(tele_dir), tele * math.sin(tele_dir)),
        arrival_rate=rate,
        command=cmd,
        initial_offset=off,
    )


def event_time(fraction: float, duration: float) -> float:
    """Map a [0, 1) fraction into the mid-episode event window."""
    lo = min(EVENT_MARGIN_START, duration)
    hi = max(lo, duration - EVENT_MARGIN_END)
    return lo + fraction * (hi - lo)


def dribble_and_stop_script(speed: float = 1.0, stop_time: float = 5.0):
    return ((0.0, (speed, 0.0)), (stop_time, (0.0, 0.0)))


def random_command_script(seed: int, duration: float = 40.0, interval: float = 10.0, limit: float = 1.0):
    """Commands drawn uniformly per axis from [-limit, limit] every ``interval`` s."""
    if interval <= 0 or duration <= 0:
        raise InvalidInputError("duration and interval must be positive")
    rng = np.random.default_rng(seed)
    n = max(1, math.ceil(duration / interval))
    return tuple(
        (k * interval, (float(rng.uniform(-limit, limit)), float(rng.uniform(-limit, limit))))
        for k in range(n)
    )


def circle_command_script(diameter: float = 5.0, speed: float = 1.0, duration: float | None = None,
                          dt: float = 0.02):
    """Tangential commands tracing a circle counter-clockwise, starting along +x.

    The step is ``dt`` nudged so that a whole number of steps spans one
    period; each step holds the heading at its midpoint, which makes the
    piecewise-constant path close exactly. ``duration`` defaults to one period.
    """
    if not (diameter > 0 and speed > 0 and dt > 0):
        raise InvalidInputError("diameter, speed and dt must be positive")
    radius = diameter / 2
    period = math.pi * diameter / speed
    if duration is None:
        duration = period
    per_lap = max(3, round(period / dt))
    h = period / per_lap
    n = max(1, math.ceil(duration / h - 1e-9))
    script = []
    for k in range(n):
        th = speed * (k + 0.5) * h / radius
        script.append((k * h, (speed * math.cos(th), speed * math.sin(th))))
    return tuple(script)
