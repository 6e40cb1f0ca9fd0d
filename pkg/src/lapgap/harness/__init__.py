"""Experiment configuration, execution and command-line entry points."""

from .config import ConfigError, ExperimentConfig, build_config
from .experiments import REGISTRY
from .runner import RunResult, make_config, replay, run_experiment

__all__ = ["ConfigError", "ExperimentConfig", "REGISTRY", "RunResult", "build_config",
           "make_config", "replay", "run_experiment"]
