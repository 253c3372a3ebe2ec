"""Scenario configuration: dataclasses, validation and YAML loading."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..ball_dynamics import TerrainParams
from ..errors import ConfigError


class Controller(str, Enum):
    FEEDBACK_GUIDED = "feedback"
    NAIVE_PURSUIT = "naive"
    IDLE = "idle"  # stands still; used to expose the bare ball dynamics


class PerceptionMode(str, Enum):
    GROUND_TRUTH = "ground_truth"
    SYNTHETIC_CAMERAS = "synthetic_cameras"


Range = tuple[float, float]


@dataclass(frozen=True)
class RandomizationRanges:
    """Uniform sampling ranges; defaults are the training ranges."""

    drag_coefficient: Range = (-0.1, 0.5)
    ball_mass: Range = (0.2, 0.4)  # kg
    teleport_distance: Range = (0.0, 1.0)  # m
    perturbation_velocity: Range = (0.0, 0.3)  # m/s
    arrival_rate: Range = (0.3, 0.7)
    command: Range = (-1.5, 1.5)  # m/s, per axis


@dataclass(frozen=True)
class EventSwitches:
    """Which randomized effects are applied to a run."""

    perturbation: bool = True  # one velocity kick mid-episode
    teleport: bool = False  # one ball teleport mid-episode
    terrain: bool = False  # draw C_D and mass instead of using ``terrain``
    arrival_rate: bool = False  # draw the camera frame arrival rate
    initial_jitter: Range = (0.03, 0.05)  # m, half-widths of the x/y ball offset


@dataclass(frozen=True)
class SensorConfig:
    arrival_rate: float = 0.5
    pixel_noise: float = 1.0  # px, std of each box edge
    velocity_noise: float = 0.05  # m/s, std of the velocity source
    body_height: float = 0.30  # m


@dataclass(frozen=True)
class ScenarioConfig:
    terrain: TerrainParams = field(default_factory=TerrainParams)
    controller: Controller = Controller.FEEDBACK_GUIDED
    command_script: tuple[tuple[float, tuple[float, float]], ...] = (
        (0.0, (1.0, 0.0)),
        (5.0, (0.0, 0.0)),
    )
    duration: float = 10.0
    dt: float = 0.02
    seed: int = 0
    perception_mode: PerceptionMode = PerceptionMode.GROUND_TRUTH
    ranges: RandomizationRanges = field(default_factory=RandomizationRanges)
    events: EventSwitches = field(default_factory=EventSwitches)
    sensors: SensorConfig = field(default_factory=SensorConfig)
    ball_position: tuple[float, float] = (0.30, 0.0)
    ball_velocity: tuple[float, float] = (0.0, 0.0)
    robot_position: tuple[float, float] = (0.0, 0.0)
    robot_yaw: float = 0.0

    def __post_init__(self):
        validate(self)

    def with_(self, **changes) -> ScenarioConfig:
        return replace(self, **changes)


def _finite(key: str, x) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {x!r}") from None
    if not math.isfinite(v):
        raise ConfigError(key, f"must be finite, got {v}")
    return v


def validate(cfg: ScenarioConfig) -> None:
    dt = _finite("dt", cfg.dt)
    if dt <= 0:
        raise ConfigError("dt", f"must be positive, got {dt}")
    dur = _finite("duration", cfg.duration)
    if dur < dt:
        raise ConfigError("duration", f"must be at least dt ({dt}), got {dur}")
    if not isinstance(cfg.seed, int) or not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed", f"must be an integer in [0, 2^64), got {cfg.seed!r}")
    if not cfg.command_script:
        raise ConfigError("command_script", "must contain at least one entry")
    prev = -math.inf
    for i, (t, cmd) in enumerate(cfg.command_script):
        t = _finite(f"command_script[{i}].time", t)
        if t < prev:
            raise ConfigError("command_script", f"times must be non-decreasing (entry {i})")
        prev = t
        if len(cmd) != 2:
            raise ConfigError(f"command_script[{i}].cmd", "must have two components")
        for c in cmd:
            _finite(f"command_script[{i}].cmd", c)
    _finite("terrain.drag_coefficient", cfg.terrain.drag_coefficient)
    if _finite("terrain.ball_mass", cfg.terrain.ball_mass) <= 0:
        raise ConfigError("terrain.ball_mass", "must be positive")
    for f in fields(RandomizationRanges):
        lo, hi = getattr(cfg.ranges, f.name)
        key = f"randomization.{f.name}"
        if _finite(key, hi) < _finite(key, lo):
            raise ConfigError(key, f"empty range [{lo}, {hi}]")
    s = cfg.sensors
    if not 0.0 <= _finite("sensors.arrival_rate", s.arrival_rate) <= 1.0:
        raise ConfigError("sensors.arrival_rate", "must lie in [0, 1]")
    for key in ("pixel_noise", "velocity_noise"):
        if _finite(f"sensors.{key}", getattr(s, key)) < 0:
            raise ConfigError(f"sensors.{key}", "must be non-negative")
    if _finite("sensors.body_height", s.body_height) <= 0.09:
        raise ConfigError("sensors.body_height", "must exceed the ball radius")


def _pair(key: str, v) -> tuple[float, float]:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError(key, f"expected a two-element list, got {v!r}")
    return _finite(key, v[0]), _finite(key, v[1])


def _enum(enum_cls, key: str, v):
    try:
        return enum_cls(v)
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise ConfigError(key, f"must be one of {allowed}, got {v!r}") from None


def _section(raw: Mapping[str, Any], key: str, cls, convert) -> Any:
    sub = raw.get(key) or {}
    if not isinstance(sub, Mapping):
        raise ConfigError(key, "must be a mapping")
    names = {f.name for f in fields(cls)}
    unknown = set(sub) - names
    if unknown:
        raise ConfigError(f"{key}.{sorted(unknown)[0]}", "unknown key")
    return cls(**{k: convert(f"{key}.{k}", v) for k, v in sub.items()})


_TOP_KEYS = {
    "terrain", "controller", "command_script", "duration", "dt", "seed", "perception_mode",
    "randomization", "events", "sensors", "ball_position", "ball_velocity", "robot_position", "robot_yaw",
}


def from_mapping(raw: Mapping[str, Any]) -> ScenarioConfig:
    """Build a config from parsed YAML; unknown or malformed keys raise ConfigError."""
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ConfigError("<root>", "configuration must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    kw: dict[str, Any] = {}
    if "terrain" in raw:
        kw["terrain"] = _section(raw, "terrain", TerrainParams, _finite)
    if "controller" in raw:
        kw["controller"] = _enum(Controller, "controller", raw["controller"])
    if "perception_mode" in raw:
        kw["perception_mode"] = _enum(PerceptionMode, "perception_mode", raw["perception_mode"])
    if "command_script" in raw:
        script = raw["command_script"]
        if not isinstance(script, list):
            raise ConfigError("command_script", "must be a list of [time, [vx, vy]] entries")
        entries = []
        for i, e in enumerate(script):
            if not isinstance(e, (list, tuple)) or len(e) != 2:
                raise ConfigError(f"command_script[{i}]", "expected [time, [vx, vy]]")
            entries.append((_finite(f"command_script[{i}].time", e[0]), _pair(f"command_script[{i}].cmd", e[1])))
        kw["command_script"] = tuple(entries)
    for key in ("duration", "dt", "robot_yaw"):
        if key in raw:
            kw[key] = _finite(key, raw[key])
    if "seed" in raw:
        s = raw["seed"]
        if isinstance(s, bool) or not isinstance(s, int):
            raise ConfigError("seed", f"must be an integer, got {s!r}")
        kw["seed"] = s
    for key in ("ball_position", "ball_velocity", "robot_position"):
        if key in raw:
            kw[key] = _pair(key, raw[key])
    if "randomization" in raw:
        kw["ranges"] = _section(raw, "randomization", RandomizationRanges, _pair)
    if "events" in raw:
        def conv(k, v):
            if k.endswith("initial_jitter"):
                return _pair(k, v)
            if not isinstance(v, bool):
                raise ConfigError(k, f"must be true or false, got {v!r}")
            return v
        kw["events"] = _section(raw, "events", EventSwitches, conv)
    if "sensors" in raw:
        kw["sensors"] = _section(raw, "sensors", SensorConfig, _finite)
    return ScenarioConfig(**kw)


def load_config(path: str | Path) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError("<file>", f"cannot read {p}: {e.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError("<file>", f"invalid YAML in {p}: {e}") from None
    return from_mapping(raw)


def to_mapping(cfg: ScenarioConfig) -> dict[str, Any]:
    """Inverse of :func:`from_mapping`, for writing example configs."""
    return {
        "seed": cfg.seed,
        "dt": cfg.dt,
        "duration": cfg.duration,
        "controller": cfg.controller.value,
        "perception_mode": cfg.perception_mode.value,
        "terrain": {"drag_coefficient": cfg.terrain.drag_coefficient, "ball_mass": cfg.terrain.ball_mass},
        "command_script": [[t, list(c)] for t, c in cfg.command_script],
        "ball_position": list(cfg.ball_position),
        "ball_velocity": list(cfg.ball_velocity),
        "robot_position": list(cfg.robot_position),
        "robot_yaw": cfg.robot_yaw,
        "randomization": {f.name: list(getattr(cfg.ranges, f.name)) for f in fields(RandomizationRanges)},
        "events": {
            f.name: (list(v) if isinstance(v := getattr(cfg.events, f.name), tuple) else v)
            for f in fields(EventSwitches)
        },
        "sensors": {f.name: getattr(cfg.sensors, f.name) for f in fields(SensorConfig)},
    }
