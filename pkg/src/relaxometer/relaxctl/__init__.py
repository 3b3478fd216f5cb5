"""Sweep engine and CLI on top of the relaxometer library."""

from .config import ExperimentConfig, Scenario, list_scenarios
from .engine import SweepResult, SweepRow, run_scenario, schedule
from .emit import emit

__all__ = [
    "ExperimentConfig",
    "Scenario",
    "SweepResult",
    "SweepRow",
    "emit",
    "list_scenarios",
    "run_scenario",
    "schedule",
]
