"""Scenario runner, reports and serialization."""

from .config import SCENARIOS, ConfigError, ScenarioConfig, build_config, read_config_file
from .emit import emit, read_field_csv, render
from .report import Comparison, ScenarioReport
from .scenarios import run_scenario

__all__ = [
    "SCENARIOS",
    "Comparison",
    "ConfigError",
    "ScenarioConfig",
    "ScenarioReport",
    "build_config",
    "emit",
    "read_config_file",
    "read_field_csv",
    "render",
    "run_scenario",
]
