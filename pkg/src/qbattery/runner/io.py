"""CSV / JSON emission and optional SVG renderings."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .experiments import COLUMNS, TrajectoryRecord
from .sweep import SweepResult

FMT = "%.12g"


def _log_unit(log_base: float) -> str:
    if math.isclose(log_base, math.e):
        return "nats"
    if log_base == 2:
        return "bits"
    return f"log base {log_base:g}"


def write_trajectory_csv(record: TrajectoryRecord, path, log_base: float = math.e) -> None:
    """Fixed columns, 12 significant digits, one '#' unit line then the column names."""
    eff = ("ergotropy per cell in omega0" if record.kind == "store"
           else "ergotropy over initial charger energy")
    header = (f"# {record.kind} trajectory; t in 1/omega0; energy and ergotropy in omega0; "
              f"efficiency = {eff}; coherence in {_log_unit(log_base)}\n" + ",".join(COLUMNS))
    np.savetxt(path, record.table, fmt=FMT, delimiter=",", header=header, comments="")


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=2, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(COLUMNS)}


def write_sweep_csv(result: SweepResult, path) -> None:
    """Row-major matrix: rows follow axis1, columns axis2; failed cells are 'nan'."""
    g = result.grid
    header = (f"# sweep of {g.observable}; rows {g.axis1.name}, columns {g.axis2.name}; "
              "energies in omega0, times in 1/omega0\n"
              + ",".join([f"{g.axis1.name}\\{g.axis2.name}"] + [FMT % v for v in g.axis2.values]))
    body = np.column_stack([g.axis1.values, result.values])
    np.savetxt(path, body, fmt=FMT, delimiter=",", header=header, comments="")


def read_sweep_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path) as fh:
        fh.readline()
        axis2 = np.array([float(x) for x in fh.readline().strip().split(",")[1:]])
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    return data[:, 0], axis2, data[:, 1:]


def write_json(summary: dict, path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def plot_trajectory(record: TrajectoryRecord, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = record.column("t")
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    label = "E / N" if record.kind == "store" else "efficiency"
    ax1.plot(t, record.column("efficiency"))
    ax1.set_ylabel(label)
    if record.peak is not None and not record.peak.monotone:
        ax1.axvline(record.peak.t, ls=":", c="k")
    ax2.plot(t, record.column("coherence"))
    ax2.set_ylabel("coherence")
    ax2.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_sweep(result: SweepResult, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    g = result.grid
    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.pcolormesh(g.axis2.values, g.axis1.values, result.values, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=g.observable)
    ax.set_xlabel(g.axis2.name)
    ax.set_ylabel(g.axis1.name)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
