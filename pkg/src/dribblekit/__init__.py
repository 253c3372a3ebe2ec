"""Ball-dribbling toolkit: drag dynamics, feedback reference, gait heuristics,
reward shaping, fisheye perception, ball filtering and a planar simulator."""
from . import ball_dynamics, ball_filter, feedback, gait, perception, rewards
from .errors import (
    CannotInitializeError,
    ConfigError,
    DribbleError,
    FilterDegenerateError,
    GeometryError,
    InvalidInputError,
    NoIntersectionError,
    OutOfViewError,
    SimulationDivergedError,
)

__version__ = "0.1.0"

__all__ = [
    "ball_dynamics", "ball_filter", "feedback", "gait", "perception", "rewards",
    "CannotInitializeError", "ConfigError", "DribbleError", "FilterDegenerateError", "GeometryError",
    "InvalidInputError", "NoIntersectionError", "OutOfViewError", "SimulationDivergedError",
]
