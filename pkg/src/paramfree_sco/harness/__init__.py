"""Seeded experiment runners, configuration and CSV reports"""

from .base_runner import BaseRunner, TrialTask
from .config_loader import ExperimentConfig, build_config, load_config, parse_key_values
from .experiments import (
    RUNNERS,
    AdaptiveRunner,
    ConcentrationRunner,
    LowerBoundRunner,
    ScalingRunner,
    SelectRunner,
    StrongConvexityRunner,
    create_runner,
)
from .reporting import ExperimentReport, fit_loglog_slope, read_report, summary_path_for

__all__ = [
    "AdaptiveRunner",
    "BaseRunner",
    "ConcentrationRunner",
    "ExperimentConfig",
    "ExperimentReport",
    "LowerBoundRunner",
    "RUNNERS",
    "ScalingRunner",
    "SelectRunner",
    "StrongConvexityRunner",
    "TrialTask",
    "build_config",
    "create_runner",
    "fit_loglog_slope",
    "load_config",
    "parse_key_values",
    "read_report",
    "summary_path_for",
]
