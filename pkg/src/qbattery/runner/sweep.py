"""Two-dimensional parameter sweeps over independent single runs."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import QBatteryError
from .config import ExperimentConfig, SweepGrid
from .experiments import run_charging, run_storage

# axis name -> config key it sets
_AXIS_KEYS = {"xi": "modulation__xi", "g": "system__g", "tau_s": "grid__t1"}


@dataclass
class SweepResult:
    grid: SweepGrid
    values: np.ndarray
    errors: dict[tuple[int, int], str] = field(default_factory=dict)

    @property
    def n_failed(self) -> int:
        return len(self.errors)

    def argmax_axis1(self) -> np.ndarray:
        """For each axis2 value, the axis1 value maximising the observable (NaN-aware)."""
        idx = np.nanargmax(self.values, axis=0)
        return self.grid.axis1.values[idx]


def cell_config(cfg: ExperimentConfig, grid: SweepGrid, v1: float, v2: float) -> ExperimentConfig:
    """The single-run config for one sweep cell."""
    return cfg.with_values(**{_AXIS_KEYS[grid.axis1.name]: float(v1),
                              _AXIS_KEYS[grid.axis2.name]: float(v2)})


def cell_value(cfg: ExperimentConfig, observable: str) -> float:
    if observable == "peak_efficiency":
        return float(run_charging(cfg).peak.value)
    # ergotropy retained at the end of a storage run of length tau_s
    return float(run_storage(cfg).column("ergotropy")[-1])


def _evaluate(args):
    raw, grid, v1, v2 = args
    try:
        cfg = cell_config(ExperimentConfig.from_dict(raw), grid, v1, v2)
        return cell_value(cfg, grid.observable), None
    except (QBatteryError, ArithmeticError, ValueError) as exc:
        return float("nan"), f"{type(exc).__name__}: {exc}"


def sweep2d(cfg: ExperimentConfig, grid: SweepGrid | None = None, *, workers: int = 1) -> SweepResult:
    """Evaluate the observable on every (axis1, axis2) cell.

    Cells are independent single runs, so a cell equals the run obtained by
    setting the two axis values in ``cfg``. Failed cells hold NaN and their
    error message is kept in ``SweepResult.errors``.
    """
    grid = cfg.sweep if grid is None else grid
    if grid is None:
        raise ValueError("no sweep grid given and the config has no [sweep] section")
    a1, a2 = grid.axis1.values, grid.axis2.values
    jobs = [(cfg.raw, grid, v1, v2) for v1 in a1 for v2 in a2]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_evaluate, jobs))
    else:
        results = [_evaluate(job) for job in jobs]
    values = np.array([v for v, _ in results]).reshape(len(a1), len(a2))
    errors = {divmod(k, len(a2)): msg for k, (_, msg) in enumerate(results) if msg is not None}
    return SweepResult(grid, values, errors)
