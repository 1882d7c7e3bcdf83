"""Simulation of modulated collective-charging quantum batteries.

Modules are ordered from the Hilbert-space plumbing up to the experiment
runner: ``hilbert`` -> ``bessel`` / ``model`` -> ``dynamics`` ->
``observables`` / ``noise`` -> ``runner``. Joint battery-charger states use
battery-first ordering, index = m_index * (n_max + 1) + n.
"""
from .errors import (AccuracyError, ConfigError, InvalidSectorError, LayoutError, QBatteryError,
                     TruncationError, UnsupportedConfigurationError)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "ConfigError", "InvalidSectorError", "LayoutError", "QBatteryError",
    "TruncationError", "UnsupportedConfigurationError",
]
