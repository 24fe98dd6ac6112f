"""Planning and batch simulation of UAV wireless-charging tours in 3D."""

from .baselines import MethodChoice
from .energy import account_schedule
from .scenario import (PRESETS, Scenario, ScenarioParams, generate_scenario,
                       load_scenario, save_scenario)
from .schedule import Schedule, load_schedule, save_schedule
from .scheduler import (InfeasibleScheduleError, PlannerOptions, PlanResult,
                        plan_schedule, validate_schedule)

__version__ = "0.1.0"

__all__ = [
    "MethodChoice", "account_schedule", "PRESETS", "Scenario",
    "ScenarioParams", "generate_scenario", "load_scenario", "save_scenario",
    "Schedule", "load_schedule", "save_schedule", "InfeasibleScheduleError",
    "PlannerOptions", "PlanResult", "plan_schedule", "validate_schedule",
    "__version__",
]
