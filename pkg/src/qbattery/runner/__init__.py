"""Scenario orchestration, sweeps, configuration and the ``qb`` CLI."""
from .config import (ChannelConfig, ExperimentConfig, GridConfig, InitialState, OutputConfig,
                     SweepAxis, SweepGrid, load_config, parse_override, parse_xi)
from .experiments import (COLUMNS, TrajectoryRecord, charging_initial_state, run, run_charging,
                          run_noisy_charging, run_storage, storage_spec)
from .sweep import SweepResult, cell_config, sweep2d

__all__ = [
    "COLUMNS", "ChannelConfig", "ExperimentConfig", "GridConfig", "InitialState", "OutputConfig",
    "SweepAxis", "SweepGrid", "SweepResult", "TrajectoryRecord", "cell_config",
    "charging_initial_state", "load_config", "parse_override", "parse_xi", "run", "run_charging",
    "run_noisy_charging", "run_storage", "storage_spec", "sweep2d",
]
