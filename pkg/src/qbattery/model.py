"""Battery-charger Hamiltonians and their parameters.

Four variants of the same charging model are provided:

* ``lab`` -- modulated Dicke Hamiltonian
  w0 Sz + wc n + lam(t) g Sx (c + c^dag) + xi nu cos(nu t) (Sz + n)
* ``interaction_exact`` -- the same in the interaction picture of the free
  and modulation parts (resonant case only)
* ``effective`` -- fast-modulation limit, counter-rotating coupling scaled by J0(2 xi)
* ``tc`` -- Tavis-Cummings, rotating coupling only

Time-dependent Hamiltonians are represented as a static matrix plus a few
``matrix * coefficient(t)`` terms, so propagators can apply them to a vector
without rebuilding dense matrices at every stage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy import sparse

from .bessel import bessel_j
from .errors import UnsupportedConfigurationError
from .hilbert import (FockSpace, JointSpace, Operator, SpinSector, collective_spin_ops,
                      fock_ops, tensor)

VARIANTS = ("lab", "interaction_exact", "effective", "tc")


@dataclass(frozen=True)
class SystemParams:
    """Charging-model parameters; energies in units of the battery gap ``omega0``.

    ``n_max`` defaults to 4N + 16: in the ultrastrong regime (g ~ omega0)
    the counter-rotating coupling spreads the charger over many Fock levels
    before the first efficiency maximum, proportionally more so for small N.
    """

    N: int
    omega0: float = 1.0
    omega_c: float = 1.0
    g: float = 1.0
    n_max: int | None = None

    def __post_init__(self):
        if self.n_max is None:
            object.__setattr__(self, "n_max", 4 * self.N + 16)
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        if self.g < 0:
            raise ValueError("g must be non-negative")
        # SpinSector / FockSpace validate N and n_max
        self.joint

    @property
    def joint(self) -> JointSpace:
        return JointSpace(SpinSector(self.N), FockSpace(self.n_max))

    @property
    def sector(self) -> SpinSector:
        return SpinSector(self.N)

    @property
    def resonant(self) -> bool:
        return math.isclose(self.omega_c, self.omega0, rel_tol=1e-12, abs_tol=0.0)


@dataclass(frozen=True)
class ModulationParams:
    """Energy-shift modulation xi * nu * cos(nu t); ``xi`` is stored as |xi|."""

    xi: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("modulation frequency nu must be non-negative")
        object.__setattr__(self, "xi", abs(float(self.xi)))
        object.__setattr__(self, "nu", float(self.nu))

    @property
    def cr_factor(self) -> float:
        """J0(2 xi), the counter-rotating coupling scale in the fast-modulation limit."""
        return bessel_j(0, 2.0 * self.xi)


@dataclass(frozen=True)
class ChargingWindow:
    """Coupling switched on for 0 <= t <= tau_c; ``math.inf`` keeps it on."""

    tau_c: float = math.inf

    def __post_init__(self):
        if not self.tau_c > 0:
            raise ValueError("tau_c must be positive")

    def __call__(self, t: float) -> float:
        return 1.0 if 0.0 <= t <= self.tau_c else 0.0


@dataclass(frozen=True, eq=False)
class Term:
    """``coeff(t) * matrix``; ``bound`` caps |coeff(t)| over all t."""

    matrix: np.ndarray
    coeff: Callable[[float], complex]
    bound: float
    diagonal: np.ndarray | None = field(default=None)
    csr: sparse.csr_matrix | None = field(default=None)


def _make_term(matrix: np.ndarray, coeff, bound: float) -> Term:
    diag = np.diagonal(matrix)
    if np.count_nonzero(matrix - np.diag(diag)) == 0:
        return Term(matrix, coeff, bound, diag.copy())
    return Term(matrix, coeff, bound, csr=sparse.csr_matrix(matrix))


@dataclass(frozen=True, eq=False)
class TimeDependentHamiltonian:
    """H(t) = static + sum_k coeff_k(t) * matrix_k.

    Callable as ``h(t) -> Operator``. ``breakpoints`` lists times where a
    coefficient jumps; propagators never step across them. Matrices stay
    dense; ``apply`` uses sparse copies since the couplings are ladder-like.
    """

    layout: object
    static: np.ndarray
    terms: tuple[Term, ...] = ()
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_static_csr", sparse.csr_matrix(self.static))

    @property
    def is_static(self) -> bool:
        return not self.terms

    def matrix(self, t: float) -> np.ndarray:
        out = np.array(self.static, dtype=complex)
        for term in self.terms:
            out += term.coeff(t) * term.matrix
        return out

    def __call__(self, t: float) -> Operator:
        return Operator(self.layout, self.matrix(t), hermitian=True)

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        """H(t) @ psi for a vector or a matrix of column vectors."""
        out = self._static_csr @ psi
        for term in self.terms:
            c = term.coeff(t)
            if c == 0:
                continue
            if term.diagonal is not None:
                d = term.diagonal if psi.ndim == 1 else term.diagonal[:, None]
                out += c * (d * psi)
            else:
                out += c * (term.csr @ psi)
        return out

    def norm_bound(self) -> float:
        """Upper bound on the spectral norm of H(t) over all t."""
        total = np.linalg.norm(self.static, 2)
        for term in self.terms:
            if term.diagonal is not None:
                total += term.bound * np.max(np.abs(term.diagonal), initial=0.0)
            else:
                total += term.bound * np.linalg.norm(term.matrix, 2)
        return float(total)


class JointOps(NamedTuple):
    sz: np.ndarray      # Sz (x) 1
    num: np.ndarray     # 1 (x) c^dag c
    sx_x: np.ndarray    # Sx (x) (c + c^dag)
    rot: np.ndarray     # S+ c + S- c^dag
    cr: np.ndarray      # S- c


@lru_cache(maxsize=32)
def joint_ops(N: int, n_max: int) -> JointOps:
    """Dense joint-space building blocks (read-only, cached per size)."""
    spin = collective_spin_ops(SpinSector(N))
    fock = fock_ops(FockSpace(n_max))
    ib = np.eye(N + 1)
    ic = np.eye(n_max + 1)
    out = JointOps(
        sz=np.kron(spin.Sz.data, ic),
        num=np.kron(ib, fock.num.data),
        sx_x=tensor(spin.Sx, fock.c + fock.cdag).data,
        rot=np.kron(spin.Sp.data, fock.c.data) + np.kron(spin.Sm.data, fock.cdag.data),
        cr=np.kron(spin.Sm.data, fock.c.data),
    )
    for arr in out:
        arr.setflags(write=False)
    return out


def _require_resonance(p: SystemParams) -> None:
    if not p.resonant:
        raise UnsupportedConfigurationError(
            "interaction-picture Hamiltonians are only defined for omega_c == omega0")


def _window_terms(ops_matrix: np.ndarray, window: ChargingWindow | None):
    if window is None or math.isinf(window.tau_c):
        return ops_matrix, (), ()
    return None, (_make_term(ops_matrix, window, 1.0),), (window.tau_c,)


def h_lab_td(p: SystemParams, m: ModulationParams,
             w: ChargingWindow | None = None) -> TimeDependentHamiltonian:
    ops = joint_ops(p.N, p.n_max)
    static = p.omega0 * ops.sz + p.omega_c * ops.num
    coupling = p.g * ops.sx_x
    always_on, terms, breaks = _window_terms(coupling, w)
    if always_on is not None:
        static = static + always_on
    terms = list(terms)
    amp = m.xi * m.nu
    if amp != 0.0:
        nu = m.nu
        terms.append(_make_term(ops.sz + ops.num, lambda t: amp * math.cos(nu * t), amp))
    return TimeDependentHamiltonian(p.joint, static, tuple(terms), breaks)


def h_lab(p: SystemParams, m: ModulationParams, w: ChargingWindow, t: float) -> Operator:
    return h_lab_td(p, m, w)(t)


def _cr_terms(scale: float, ops: JointOps, phase: Callable[[float], complex]) -> tuple[Term, ...]:
    if scale == 0.0:
        return ()
    fwd = scale * ops.cr
    back = fwd.T.copy()
    return (
        _make_term(fwd, phase, 1.0),
        _make_term(back, lambda t: phase(t).conjugate(), 1.0),
    )


def h_int_exact_td(p: SystemParams, m: ModulationParams) -> TimeDependentHamiltonian:
    _require_resonance(p)
    ops = joint_ops(p.N, p.n_max)
    w0, xi, nu = p.omega0, m.xi, m.nu

    def phase(t):
        return complex(np.exp(-2j * w0 * t - 2j * xi * math.sin(nu * t)))

    terms = _cr_terms(0.5 * p.g, ops, phase)
    return TimeDependentHamiltonian(p.joint, 0.5 * p.g * ops.rot, terms)


def h_int_exact(p: SystemParams, m: ModulationParams, t: float) -> Operator:
    return h_int_exact_td(p, m)(t)


def h_int_effective_td(p: SystemParams, m: ModulationParams) -> TimeDependentHamiltonian:
    _require_resonance(p)
    ops = joint_ops(p.N, p.n_max)
    w0 = p.omega0

    def phase(t):
        return complex(np.exp(-2j * w0 * t))

    terms = _cr_terms(0.5 * p.g * m.cr_factor, ops, phase)
    return TimeDependentHamiltonian(p.joint, 0.5 * p.g * ops.rot, terms)


def h_int_effective(p: SystemParams, m: ModulationParams, t: float) -> Operator:
    return h_int_effective_td(p, m)(t)


def h_tc(p: SystemParams) -> Operator:
    ops = joint_ops(p.N, p.n_max)
    return Operator(p.joint, 0.5 * p.g * ops.rot, hermitian=True)


def h_tc_td(p: SystemParams) -> TimeDependentHamiltonian:
    return TimeDependentHamiltonian(p.joint, h_tc(p).data)


def hamiltonian(variant: str, p: SystemParams, m: ModulationParams,
                w: ChargingWindow | None = None) -> TimeDependentHamiltonian:
    """Time-dependent Hamiltonian for one of ``VARIANTS``.

    The charging window only affects the lab-frame variant; the interaction
    pictures describe the coupling while it is on.
    """
    if variant == "lab":
        return h_lab_td(p, m, w)
    if variant == "interaction_exact":
        return h_int_exact_td(p, m)
    if variant == "effective":
        return h_int_effective_td(p, m)
    if variant == "tc":
        return h_tc_td(p)
    raise ValueError(f"unknown Hamiltonian variant {variant!r}; expected one of {VARIANTS}")


def free_phases(p: SystemParams, m: ModulationParams, t: float) -> np.ndarray:
    """Diagonal of exp(-i int_0^t [H_b + H_c + H_m] dt') on the joint space.

    Maps interaction-picture states to the lab frame: psi_lab = phases * psi_int.
    """
    ops = joint_ops(p.N, p.n_max)
    sz = np.diagonal(ops.sz)
    num = np.diagonal(ops.num)
    mod = m.xi * math.sin(m.nu * t) if m.nu else 0.0
    angle = p.omega0 * t * sz + p.omega_c * t * num + mod * (sz + num)
    return np.exp(-1j * angle)


def battery_hamiltonian(sector: SpinSector, omega0: float = 1.0) -> Operator:
    """H_b = omega0 * Sz."""
    return Operator(sector, omega0 * collective_spin_ops(sector).Sz.data, hermitian=True)


def charger_hamiltonian(space: FockSpace, omega_c: float = 1.0) -> Operator:
    return Operator(space, omega_c * np.diag(np.arange(space.dim)), hermitian=True)
