"""Charging, noisy-charging and storage scenarios.

Each scenario propagates the configured state, reduces it to the battery
at every output sample and records energy, ergotropy, efficiency and
coherence together with the integrator diagnostics.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import LindbladSpec, propagate_lindblad, propagate_state
from ..errors import ConfigError, TruncationError, UnsupportedConfigurationError
from ..hilbert import (DensityMatrix, JointSpace, PureState, basis_state, collective_spin_ops,
                       embed_battery, partial_trace_battery, uniform_superposition)
from ..model import battery_hamiltonian, hamiltonian
from ..noise import dephasing_spec, dissipation_spec
from ..observables import (Peak, ergotropy, first_local_max, mean_energy,
                           rel_entropy_coherence)
from .config import ExperimentConfig, InitialState

COLUMNS = ("t", "energy", "ergotropy", "efficiency", "coherence",
           "diag_norm_or_trace_err", "min_eig")

STORE_HORIZON = 20.0
CHARGE_HORIZON = 10.0


@dataclass
class TrajectoryRecord:
    """Per-sample battery observables plus integrator diagnostics.

    ``efficiency`` is ergotropy over the charger's initial energy for charging
    runs and the mean ergotropy per cell for storage runs.
    """

    kind: str
    n_cells: int
    rows: list[tuple[float, ...]] = field(default_factory=list)
    battery_states: list[DensityMatrix] = field(default_factory=list, repr=False)
    peak: Peak | None = None
    stopped_early: bool = False

    def column(self, name: str) -> np.ndarray:
        return np.array([row[COLUMNS.index(name)] for row in self.rows])

    @property
    def table(self) -> np.ndarray:
        return np.array(self.rows, dtype=float).reshape(-1, len(COLUMNS))

    def state_at(self, index: int) -> DensityMatrix:
        return self.battery_states[index]

    def summary(self) -> dict:
        err = self.column("diag_norm_or_trace_err")
        return {
            "peak_efficiency": None if self.peak is None else self.peak.value,
            "tau_c": None if self.peak is None else self.peak.t,
            "peak_monotone": None if self.peak is None else self.peak.monotone,
            "final_ergotropy_per_cell": float(self.column("ergotropy")[-1] / self.n_cells),
            "stopped_early": self.stopped_early,
            "diagnostics": {
                "max_norm_err": float(err.max()),
                "min_eig": float(self.column("min_eig").min()),
            },
        }


class _Recorder:
    """Monitor that fills a record and decides when a charging peak is confirmed."""

    def __init__(self, record: TrajectoryRecord, h_b, supply: float, log_base: float,
                 prominence: float | None):
        self.record = record
        self.h_b = h_b
        self.supply = supply
        self.log_base = log_base
        self.prominence = prominence
        self._best = -math.inf

    def add(self, t: float, rho_b: DensityMatrix, err: float, min_eig: float) -> bool:
        erg = ergotropy(rho_b, self.h_b)
        eff = erg / self.supply
        row = (float(t), mean_energy(rho_b, self.h_b), erg, eff,
               rel_entropy_coherence(rho_b, self.h_b, self.log_base), float(err), float(min_eig))
        self.record.rows.append(row)
        self.record.battery_states.append(rho_b)
        return self._peak_confirmed(eff)

    def _peak_confirmed(self, value: float) -> bool:
        if self.prominence is None:
            return False
        self._best = max(self._best, value)
        # cheap necessary condition before scanning the whole series
        if value >= self._best - max(self.prominence, 1e-12) or len(self.record.rows) < 3:
            return False
        rec = self.record
        peak = first_local_max((rec.column("t"), rec.column("efficiency")),
                               min_prominence=self.prominence)
        return not peak.monotone


def _battery_state(init: InitialState, cfg: ExperimentConfig) -> PureState:
    sector = cfg.system.sector
    if init.kind == "uniform_superposition":
        return uniform_superposition(sector)
    if init.kind == "dicke":
        return basis_state(sector, init.m_index)
    if init.kind == "amplitudes":
        amps = np.asarray(init.amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-8:
            raise ConfigError(f"system.amplitudes must be normalised (norm {norm:.12g})")
        return PureState(sector, amps)
    if init.kind == "ground_fockN":
        return basis_state(sector, 0)
    raise ConfigError(f"initial state {init.kind!r} is not a battery state")


def charging_initial_state(cfg: ExperimentConfig) -> PureState:
    """Battery state (x) charger Fock state |N>."""
    init = cfg.initial_for("charge")
    if init.kind == "charged":
        raise ConfigError("initial state 'charged' only applies to storage runs")
    joint = cfg.system.joint
    if joint.fock.n_max < cfg.system.N:
        raise ConfigError(f"system.n_max = {joint.fock.n_max} cannot hold the charger state |N = {cfg.system.N}>")
    battery = _battery_state(init, cfg).amplitudes
    charger = np.zeros(joint.fock.dim)
    charger[cfg.system.N] = 1.0
    return PureState(joint, np.kron(battery, charger))


def _charge_setup(cfg: ExperimentConfig):
    p = cfg.system
    if p.g > 0:
        t1 = CHARGE_HORIZON / p.g
    else:
        t1 = CHARGE_HORIZON / p.omega0
    grid = cfg.grid.time_grid(t1)
    h = hamiltonian(cfg.variant, p, cfg.modulation, cfg.window)
    h_b = battery_hamiltonian(p.sector, p.omega0)
    supply = p.N * p.omega_c
    prominence = cfg.grid.peak_prominence if cfg.grid.stop_at_peak else None
    return grid, h, h_b, supply, prominence


def _leak_check(joint: JointSpace, top_population: float, t: float, tol: float) -> None:
    if top_population > tol:
        raise TruncationError(
            f"population {top_population:.3g} in the top two Fock levels at t={t:.6g} "
            f"exceeds {tol:g}; raise system.n_max (now {joint.fock.n_max})")


def _finish(record: TrajectoryRecord, prominence: float, stopped: bool) -> TrajectoryRecord:
    record.peak = first_local_max((record.column("t"), record.column("efficiency")),
                                  min_prominence=prominence)
    record.stopped_early = stopped
    return record


def run_charging(cfg: ExperimentConfig) -> TrajectoryRecord:
    """Closed-system charging under the configured Hamiltonian variant.

    The charging time is the first efficiency maximum whose prominence
    reaches ``grid.peak_prominence``; with ``grid.stop_at_peak`` the run ends
    once that maximum is confirmed.
    """
    if cfg.channel.kind != "none":
        raise ConfigError("run_charging needs channel.kind = 'none'; use run_noisy_charging")
    grid, h, h_b, supply, prominence = _charge_setup(cfg)
    psi0 = charging_initial_state(cfg)
    joint = cfg.system.joint
    record = TrajectoryRecord("charge", cfg.system.N)
    rec = _Recorder(record, h_b, supply, cfg.output.log_base, prominence)
    n_samples = grid.n_samples

    def monitor(t, psi):
        table = psi.table()
        _leak_check(joint, float(np.sum(np.abs(table[:, -2:]) ** 2)), t, cfg.grid.leak_tol)
        rho_b = partial_trace_battery(psi)
        return rec.add(t, rho_b, abs(psi.norm - 1.0), float(rho_b.eigenvalues()[0]))

    traj = propagate_state(h, psi0, grid, monitor=monitor)
    return _finish(record, cfg.grid.peak_prominence, len(traj) < n_samples)


def run_noisy_charging(cfg: ExperimentConfig) -> TrajectoryRecord:
    """Charging with collective battery decay S- (x) 1 at the configured direct rate."""
    if cfg.channel.kind != "dissipation":
        raise ConfigError("noisy charging needs channel.kind = 'dissipation'")
    if cfg.channel.rate is None:
        raise ConfigError("noisy charging takes a direct rate (channel.rate or channel.gamma0)")
    if cfg.variant not in ("effective", "tc"):
        raise UnsupportedConfigurationError(
            "noisy charging is defined for the 'effective' and 'tc' variants")
    grid, h, h_b, supply, prominence = _charge_setup(cfg)
    p = cfg.system
    joint = p.joint
    jump = embed_battery(collective_spin_ops(p.sector).Sm, joint)
    spec = LindbladSpec(joint, h, ((jump, cfg.channel.rate),))
    rho0 = charging_initial_state(cfg).to_density()
    record = TrajectoryRecord("charge", p.N)
    rec = _Recorder(record, h_b, supply, cfg.output.log_base, prominence)
    top = np.zeros(joint.shape, dtype=bool)
    top[:, -2:] = True
    top = top.reshape(-1)

    def monitor(t, rho):
        _leak_check(joint, float(np.real(np.diagonal(rho.data)[top].sum())), t, cfg.grid.leak_tol)
        diag = rho.diagnostics()
        return rec.add(t, partial_trace_battery(rho), diag["trace_err"], diag["min_eig"])

    traj = propagate_lindblad(spec, rho0, grid, monitor=monitor)
    return _finish(record, cfg.grid.peak_prominence, len(traj) < grid.n_samples)


def storage_spec(cfg: ExperimentConfig) -> LindbladSpec:
    p = cfg.system
    kind = cfg.channel.kind
    if kind == "dephasing":
        return dephasing_spec(cfg.channel.dephasing(p.omega0), p.sector)
    if kind == "dissipation":
        return dissipation_spec(cfg.channel.dissipation(cfg.modulation, p.omega0), p.sector)
    return LindbladSpec(p.sector)


def storage_initial_state(cfg: ExperimentConfig) -> DensityMatrix:
    init = cfg.initial_for("store")
    if init.kind == "ground_fockN":
        raise ConfigError("initial state 'ground_fockN' only applies to charging runs")
    if init.kind == "charged":
        # the storage time grid does not apply to the charging leg
        raw = copy.deepcopy(cfg.raw)
        raw["channel"] = {"kind": "none"}
        raw["system"]["initial"] = "ground_fockN"
        raw["grid"] = {k: v for k, v in raw.get("grid", {}).items()
                       if k in ("dt_max", "peak_prominence", "leak_tol")}
        raw["sweep"] = {}
        charge_cfg = ExperimentConfig.from_dict(raw)
        charged = run_charging(charge_cfg)
        return charged.state_at(charged.peak.index)
    return _battery_state(init, cfg).to_density()


def run_storage(cfg: ExperimentConfig, rho0: DensityMatrix | None = None) -> TrajectoryRecord:
    """Battery-only storage under the configured channel.

    ``rho0`` overrides the configured initial state, e.g. with a battery
    state handed over from a charging run.
    """
    p = cfg.system
    grid = cfg.grid.time_grid(STORE_HORIZON / p.omega0)
    spec = storage_spec(cfg)
    if rho0 is None:
        rho0 = storage_initial_state(cfg)
    h_b = battery_hamiltonian(p.sector, p.omega0)
    record = TrajectoryRecord("store", p.N)
    rec = _Recorder(record, h_b, p.N * p.omega0, cfg.output.log_base, None)

    def monitor(t, rho):
        diag = rho.diagnostics()
        return rec.add(t, rho, diag["trace_err"], diag["min_eig"])

    propagate_lindblad(spec, rho0, grid, monitor=monitor)
    return record


def run(command: str, cfg: ExperimentConfig) -> TrajectoryRecord:
    """Dispatch ``charge`` (noisy when a dissipation channel is configured) or ``store``."""
    if command == "charge":
        if cfg.channel.kind == "none":
            return run_charging(cfg)
        return run_noisy_charging(cfg)
    if command == "store":
        return run_storage(cfg)
    raise ValueError(f"unknown command {command!r}")
