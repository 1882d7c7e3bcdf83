"""Experiment configuration: TOML files plus ``section.key=value`` overrides.

Every section and key is declared in ``SCHEMA``; anything else is rejected
so a misspelt key can never fall back to a default silently.

Example::

    [system]
    N = 8
    g = 1.0
    variant = "effective"

    [modulation]
    xi = "j0_zero:1"     # half the first zero of J0, i.e. J0(2 xi) = 0
    nu = 50.0

    [channel]
    kind = "dissipation"
    rate = 0.1
"""
from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..bessel import bessel_j0_zero
from ..dynamics import LEAK_TOL, TimeGrid
from ..errors import ConfigError
from ..model import VARIANTS, ChargingWindow, ModulationParams, SystemParams
from ..noise import DephasingChannel, DissipationChannel, LorentzianSpectrum, effective_rate

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

INITIAL_STATES = ("ground_fockN", "uniform_superposition", "dicke", "amplitudes", "charged")
CHANNELS = ("none", "dephasing", "dissipation")
SWEEP_AXES = ("xi", "g", "tau_s")
SWEEP_OBSERVABLES = {"peak_efficiency": {"xi", "g"}, "ergotropy_at_time": {"xi", "tau_s"}}

_NUM = (int, float)
_REQUIRED = object()

# section -> key -> (accepted types, default); None means "derived" or "unset"
SCHEMA: dict[str, dict[str, tuple[tuple[type, ...], Any]]] = {
    "system": {
        "N": ((int,), 8),
        "omega0": (_NUM, 1.0),
        "omega_c": (_NUM, 1.0),
        "g": (_NUM, 1.0),
        "n_max": ((int,), None),
        "variant": ((str,), "effective"),
        "initial": ((str,), None),
        "dicke_m_index": ((int,), None),
        "amplitudes": ((list,), None),
    },
    "modulation": {
        "xi": ((int, float, str), 0.0),
        "nu": (_NUM, 0.0),
    },
    "window": {
        "tau_c": ((int, float, str), "auto"),
    },
    "channel": {
        "kind": ((str,), "none"),
        "gamma": (_NUM, None),
        "omega": (_NUM, None),
        "rate": (_NUM, None),
        "gamma0": (_NUM, None),
        "spectrum": ((str,), None),
        "Omega": (_NUM, None),
        "lambda": (_NUM, None),
        "omega_a": (_NUM, None),
    },
    "grid": {
        "t0": (_NUM, 0.0),
        "t1": (_NUM, None),
        "n_samples": ((int,), 2000),
        "dt_max": (_NUM, None),
        "stop_at_peak": ((bool,), True),
        "peak_prominence": (_NUM, 0.05),
        "leak_tol": (_NUM, LEAK_TOL),
    },
    "output": {
        "csv": ((str,), None),
        "json": ((str,), None),
        "plot": ((bool,), False),
        "log_base": ((int, float, str), "e"),
    },
    "sweep": {
        "axis1": ((str,), None),
        "axis2": ((str,), None),
        "observable": ((str,), None),
    },
}


@dataclass(frozen=True)
class InitialState:
    """Battery initial state; charging runs attach the charger Fock state |N>."""

    kind: str
    m_index: int | None = None
    amplitudes: tuple[complex, ...] | None = None


@dataclass(frozen=True)
class ChannelConfig:
    kind: str = "none"
    gamma: float | None = None
    omega: float | None = None
    rate: float | None = None
    spectrum: LorentzianSpectrum | None = None

    def dephasing(self, omega0: float) -> DephasingChannel:
        return DephasingChannel(self.gamma, omega0 if self.omega is None else self.omega)

    def dissipation(self, m: ModulationParams, omega0: float) -> DissipationChannel:
        """Direct rate if given, else the modulation-engineered rate of the spectrum."""
        if self.rate is not None:
            return DissipationChannel(self.rate)
        return DissipationChannel(effective_rate(m, self.spectrum, omega0))


@dataclass(frozen=True)
class GridConfig:
    t0: float = 0.0
    t1: float | None = None
    n_samples: int = 2000
    dt_max: float | None = None
    stop_at_peak: bool = True
    peak_prominence: float = 0.05
    leak_tol: float = LEAK_TOL

    def time_grid(self, default_t1: float) -> TimeGrid:
        return TimeGrid(self.t0, default_t1 if self.t1 is None else self.t1,
                        self.n_samples, self.dt_max)


@dataclass(frozen=True)
class OutputConfig:
    csv: str | None = None
    json: str | None = None
    plot: bool = False
    log_base: float = math.e


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    @property
    def values(self):
        import numpy as np
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def parse(cls, text: str) -> SweepAxis:
        """``"name:start:stop:count"``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"sweep axis {text!r} must look like name:start:stop:count")
        name = parts[0].strip()
        try:
            start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ConfigError(f"sweep axis {text!r}: {exc}") from None
        return cls(name, start, stop, count)


@dataclass(frozen=True)
class SweepGrid:
    axis1: SweepAxis
    axis2: SweepAxis
    observable: str

    def __post_init__(self):
        for ax in (self.axis1, self.axis2):
            if ax.name not in SWEEP_AXES:
                raise ConfigError(f"unknown sweep axis {ax.name!r}; expected one of {SWEEP_AXES}")
            if ax.count < 2:
                raise ConfigError(f"sweep axis {ax.name!r} needs at least 2 points")
            if not ax.stop > ax.start:
                raise ConfigError(f"sweep axis {ax.name!r} needs start < stop")
        allowed = SWEEP_OBSERVABLES.get(self.observable)
        if allowed is None:
            raise ConfigError(f"unknown sweep observable {self.observable!r}; "
                              f"expected one of {sorted(SWEEP_OBSERVABLES)}")
        if {self.axis1.name, self.axis2.name} != allowed:
            raise ConfigError(f"observable {self.observable!r} sweeps the axes {sorted(allowed)}")


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemParams
    modulation: ModulationParams
    window: ChargingWindow | None
    variant: str
    channel: ChannelConfig
    initial: InitialState | None
    grid: GridConfig
    output: OutputConfig
    sweep: SweepGrid | None = None
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_dict(cls, raw: dict) -> ExperimentConfig:
        """Validate a nested mapping against ``SCHEMA`` and build the config."""
        resolved = _resolve(raw)
        try:
            return _build(resolved)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    def with_values(self, **dotted) -> ExperimentConfig:
        """Copy with ``section__key=value`` replacements, re-validated."""
        raw = copy.deepcopy(self.raw)
        for name, value in dotted.items():
            section, key = name.split("__", 1)
            raw.setdefault(section, {})[key] = value
        return ExperimentConfig.from_dict(raw)

    def initial_for(self, command: str) -> InitialState:
        """Initial state with the per-command default filled in."""
        if self.initial is not None:
            return self.initial
        return InitialState("ground_fockN" if command == "charge" else "uniform_superposition")


def _check_type(section, key, value, types):
    if isinstance(value, bool) and bool not in types:
        raise ConfigError(f"{section}.{key}: expected {_type_names(types)}, got a boolean")
    if not isinstance(value, types):
        raise ConfigError(f"{section}.{key}: expected {_type_names(types)}, got {value!r}")


def _type_names(types):
    return " or ".join(t.__name__ for t in types)


def _resolve(raw: dict) -> dict:
    """Reject unknown sections/keys, type-check values and fill defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a table of sections")
    out = {}
    for section, table in raw.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]; expected one of {sorted(SCHEMA)}")
        if not isinstance(table, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key in table:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}; expected one of {sorted(SCHEMA[section])}")
    for section, keys in SCHEMA.items():
        table = raw.get(section, {})
        out[section] = {}
        for key, (types, default) in keys.items():
            value = table.get(key, default)
            if value is not None:
                _check_type(section, key, value, types)
            out[section][key] = value
    return out


def parse_xi(value) -> float:
    """A number, or ``"j0_zero:k"`` for half the k-th zero of J0 (so J0(2 xi) = 0)."""
    if isinstance(value, str):
        head, _, tail = value.partition(":")
        if head.strip() != "j0_zero" or not tail.strip().isdigit():
            raise ConfigError(f"modulation.xi: expected a number or 'j0_zero:k', got {value!r}")
        return 0.5 * bessel_j0_zero(int(tail))
    return float(value)


def _parse_log_base(value) -> float:
    if value == "e":
        return math.e
    if isinstance(value, str):
        raise ConfigError(f"output.log_base: expected 'e' or a number, got {value!r}")
    if not value > 1:
        raise ConfigError("output.log_base must exceed 1")
    return float(value)


def _parse_amplitudes(values: list) -> tuple[complex, ...]:
    out = []
    for v in values:
        if isinstance(v, list) and len(v) == 2 and all(isinstance(x, _NUM) for x in v):
            out.append(complex(v[0], v[1]))
        elif isinstance(v, _NUM) and not isinstance(v, bool):
            out.append(complex(v))
        else:
            raise ConfigError(f"system.amplitudes: entries must be numbers or [re, im] pairs, got {v!r}")
    return tuple(out)


def _build(r: dict) -> ExperimentConfig:
    s = r["system"]
    system = SystemParams(s["N"], float(s["omega0"]), float(s["omega_c"]), float(s["g"]), s["n_max"])
    if s["variant"] not in VARIANTS:
        raise ConfigError(f"system.variant must be one of {VARIANTS}, got {s['variant']!r}")

    initial = None
    if s["initial"] is not None:
        kind = s["initial"]
        if kind not in INITIAL_STATES:
            raise ConfigError(f"system.initial must be one of {INITIAL_STATES}, got {kind!r}")
        if kind == "dicke":
            if s["dicke_m_index"] is None:
                raise ConfigError("system.initial = 'dicke' needs system.dicke_m_index")
            if not 0 <= s["dicke_m_index"] <= system.N:
                raise ConfigError(f"system.dicke_m_index must lie in 0..{system.N}")
        amps = None
        if kind == "amplitudes":
            if s["amplitudes"] is None:
                raise ConfigError("system.initial = 'amplitudes' needs system.amplitudes")
            amps = _parse_amplitudes(s["amplitudes"])
            if len(amps) != system.N + 1:
                raise ConfigError(f"system.amplitudes needs N + 1 = {system.N + 1} entries")
        initial = InitialState(kind, s["dicke_m_index"], amps)

    modulation = ModulationParams(parse_xi(r["modulation"]["xi"]), float(r["modulation"]["nu"]))

    tau = r["window"]["tau_c"]
    if isinstance(tau, str):
        if tau != "auto":
            raise ConfigError(f"window.tau_c: expected a number or 'auto', got {tau!r}")
        window = None
    else:
        window = ChargingWindow(float(tau))

    channel = _build_channel(r["channel"])

    g = r["grid"]
    grid = GridConfig(float(g["t0"]), None if g["t1"] is None else float(g["t1"]), g["n_samples"],
                      None if g["dt_max"] is None else float(g["dt_max"]), g["stop_at_peak"],
                      float(g["peak_prominence"]), float(g["leak_tol"]))
    if grid.peak_prominence < 0:
        raise ConfigError("grid.peak_prominence must be non-negative")
    if grid.n_samples < 2:
        raise ConfigError("grid.n_samples must be at least 2")
    if grid.t1 is not None and not grid.t1 > grid.t0:
        raise ConfigError("grid.t1 must exceed grid.t0")
    if grid.dt_max is not None and not grid.dt_max > 0:
        raise ConfigError("grid.dt_max must be positive")

    o = r["output"]
    output = OutputConfig(o["csv"], o["json"], o["plot"], _parse_log_base(o["log_base"]))

    sw = r["sweep"]
    sweep = None
    if any(v is not None for v in sw.values()):
        if any(v is None for v in sw.values()):
            raise ConfigError("[sweep] needs axis1, axis2 and observable")
        sweep = SweepGrid(SweepAxis.parse(sw["axis1"]), SweepAxis.parse(sw["axis2"]), sw["observable"])

    return ExperimentConfig(system, modulation, window, s["variant"], channel, initial,
                            grid, output, sweep, raw=r)


def _build_channel(c: dict) -> ChannelConfig:
    kind = c["kind"]
    if kind not in CHANNELS:
        raise ConfigError(f"channel.kind must be one of {CHANNELS}, got {kind!r}")
    if kind == "none":
        return ChannelConfig()
    if kind == "dephasing":
        if c["gamma"] is None:
            raise ConfigError("dephasing channel needs channel.gamma")
        return ChannelConfig(kind, gamma=float(c["gamma"]),
                             omega=None if c["omega"] is None else float(c["omega"]))
    # dissipation: a direct rate (``rate``, alias ``gamma0``) or a spectrum
    if c["rate"] is not None and c["gamma0"] is not None:
        raise ConfigError("give channel.rate or channel.gamma0, not both")
    rate = c["rate"] if c["rate"] is not None else c["gamma0"]
    spectrum = None
    if c["spectrum"] is not None:
        if c["spectrum"] != "lorentz":
            raise ConfigError(f"channel.spectrum must be 'lorentz', got {c['spectrum']!r}")
        if rate is not None:
            raise ConfigError("give either a direct dissipation rate or a spectrum, not both")
        missing = [k for k in ("Omega", "lambda", "omega_a") if c[k] is None]
        if missing:
            raise ConfigError(f"Lorentzian spectrum needs channel.{', channel.'.join(missing)}")
        spectrum = LorentzianSpectrum(float(c["Omega"]), float(c["lambda"]), float(c["omega_a"]))
    elif rate is None:
        raise ConfigError("dissipation channel needs channel.rate (or gamma0) or channel.spectrum")
    return ChannelConfig(kind, rate=None if rate is None else float(rate), spectrum=spectrum)


def parse_override(text: str) -> tuple[str, str, Any]:
    """``"section.key=value"``; the value is read as a TOML literal, else as a bare string."""
    lhs, sep, rhs = text.partition("=")
    if not sep:
        raise ConfigError(f"override {text!r} must look like section.key=value")
    section, dot, key = lhs.strip().partition(".")
    if not dot or not section or not key:
        raise ConfigError(f"override {text!r} must name section.key")
    rhs = rhs.strip()
    try:
        value = tomllib.loads(f"v = {rhs}")["v"]
    except tomllib.TOMLDecodeError:
        value = rhs
    return section, key, value


def load_config(path: str | Path | None = None, overrides=()) -> ExperimentConfig:
    """Read a TOML config (or start from defaults) and apply overrides."""
    raw: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
    for item in overrides:
        section, key, value = parse_override(item)
        raw.setdefault(section, {})[key] = value
    return ExperimentConfig.from_dict(raw)
