"""Command line interface: config parsing, experiment runners, reports."""

from .config import ConfigError, ExperimentConfig, default_config
from .experiments import ExperimentResult, run_experiment
from .main import main

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "default_config",
    "main",
    "run_experiment",
]
