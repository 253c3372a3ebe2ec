"""Planar closed-loop dribbling harness."""
from .config import (
    Controller,
    EventSwitches,
    PerceptionMode,
    RandomizationRanges,
    ScenarioConfig,
    SensorConfig,
    from_mapping,
    load_config,
    to_mapping,
)
from .controllers import GuidedParams, naive_pursuit_target
from .physics import BodyParams, ContactParams, StrikeParams, body_step, contact_step
from .randomization import (
    RandomizationSample,
    circle_command_script,
    dribble_and_stop_script,
    random_command_script,
    sample_randomization,
)
from .runner import (
    COLUMNS,
    Metrics,
    ScenarioResult,
    TrajectoryRecord,
    WorldState,
    ate,
    record_to_csv,
    run_scenario,
    write_outputs,
)

__all__ = [
    "COLUMNS", "BodyParams", "ContactParams", "Controller", "EventSwitches", "GuidedParams", "Metrics",
    "PerceptionMode", "RandomizationRanges", "RandomizationSample", "ScenarioConfig", "ScenarioResult",
    "SensorConfig", "StrikeParams", "TrajectoryRecord", "WorldState", "ate", "body_step",
    "circle_command_script", "contact_step", "dribble_and_stop_script", "from_mapping", "load_config",
    "naive_pursuit_target", "random_command_script", "record_to_csv", "run_scenario",
    "sample_randomization", "to_mapping", "write_outputs",
]
