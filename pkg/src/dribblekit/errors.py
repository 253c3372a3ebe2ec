"""Exception hierarchy shared across the package."""


class DribbleError(Exception):
    """Base class for all package errors."""


class InvalidInputError(DribbleError, ValueError):
    pass


class GeometryError(DribbleError, ValueError):
    """Camera geometry cannot be evaluated for the given input."""


class OutOfViewError(GeometryError):
    pass


class NoIntersectionError(GeometryError):
    pass


class CannotInitializeError(DribbleError):
    pass


class FilterDegenerateError(DribbleError, ArithmeticError):
    pass


class ConfigError(DribbleError, ValueError):
    """Bad scenario configuration. ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class SimulationDivergedError(DribbleError, ArithmeticError):
    def __init__(self, step: int, message: str = "non-finite state"):
        super().__init__(f"simulation diverged at step {step}: {message}")
        self.step = step
