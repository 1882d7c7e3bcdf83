"""Hilbert-space layouts, collective-spin and bosonic operators, states.

Only the maximal-spin sector S = N/2 of N two-level cells is represented:
basis label ``m_index`` in 0..N stands for the Dicke state |N/2, -N/2 + m_index>.
Joint battery-charger vectors use battery-first ordering,

    index = m_index * (n_max + 1) + n,

so a joint amplitude vector reshapes to an ``(N + 1, n_max + 1)`` table whose
rows are battery levels and columns are photon numbers.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral
from typing import NamedTuple, Union

import numpy as np

from .errors import InvalidSectorError, LayoutError

HERMITIAN_TOL = 1e-12


def _is_int(value) -> bool:
    return isinstance(value, Integral) and not isinstance(value, bool)


@dataclass(frozen=True)
class SpinSector:
    """Symmetric (S = N/2) sector of ``n_cells`` two-level systems."""

    n_cells: int

    def __post_init__(self):
        if not _is_int(self.n_cells) or self.n_cells < 1:
            raise InvalidSectorError(
                f"n_cells must be a positive integer, got {self.n_cells!r}")

    @property
    def dim(self) -> int:
        return self.n_cells + 1

    @property
    def spin(self) -> float:
        return self.n_cells / 2

    @property
    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers -S..S in basis order."""
        return np.arange(self.dim) - self.spin


@dataclass(frozen=True)
class FockSpace:
    n_max: int

    def __post_init__(self):
        if not _is_int(self.n_max) or self.n_max < 0:
            raise LayoutError(f"n_max must be a non-negative integer, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


@dataclass(frozen=True)
class JointSpace:
    spin: SpinSector
    fock: FockSpace

    @property
    def dim(self) -> int:
        return self.spin.dim * self.fock.dim

    @property
    def shape(self) -> tuple[int, int]:
        return self.spin.dim, self.fock.dim

    def index(self, m_index: int, n: int) -> int:
        if not (0 <= m_index <= self.spin.n_cells):
            raise LayoutError(f"m_index {m_index} outside 0..{self.spin.n_cells}")
        if not (0 <= n <= self.fock.n_max):
            raise LayoutError(f"photon number {n} outside 0..{self.fock.n_max}")
        return m_index * self.fock.dim + n


Layout = Union[SpinSector, FockSpace, JointSpace]


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


def _require_same_layout(a, b) -> None:
    if a.layout != b.layout:
        raise LayoutError(f"layout mismatch: {a.layout} vs {b.layout}")


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix tagged with the layout it acts on.

    Passing ``hermitian=True`` asserts Hermiticity; the claim is verified
    to ``HERMITIAN_TOL`` at construction.
    """

    layout: Layout
    data: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise LayoutError(f"operator must be square, got shape {data.shape}")
        if data.shape[0] != self.layout.dim:
            raise LayoutError(
                f"operator dimension {data.shape[0]} does not match layout dim {self.layout.dim}")
        object.__setattr__(self, "data", data)
        if self.hermitian:
            err = hermiticity_error(data)
            if err >= HERMITIAN_TOL:
                raise ValueError(f"operator flagged Hermitian but max|A - A^dag| = {err:.3g}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def dag(self) -> Operator:
        return Operator(self.layout, self.data.conj().T, self.hermitian)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return hermiticity_error(self.data) < tol

    def __add__(self, other: Operator) -> Operator:
        _require_same_layout(self, other)
        return Operator(self.layout, self.data + other.data)

    def __sub__(self, other: Operator) -> Operator:
        _require_same_layout(self, other)
        return Operator(self.layout, self.data - other.data)

    def __neg__(self) -> Operator:
        return Operator(self.layout, -self.data, self.hermitian)

    def __mul__(self, scalar) -> Operator:
        if isinstance(scalar, Operator):
            raise TypeError("use @ for operator products")
        return Operator(self.layout, scalar * self.data)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> Operator:
        return Operator(self.layout, self.data / scalar)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _require_same_layout(self, other)
            return Operator(self.layout, self.data @ other.data)
        if isinstance(other, PureState):
            _require_same_layout(self, other)
            return PureState(self.layout, self.data @ other.amplitudes)
        return NotImplemented

    def __repr__(self):
        return f"Operator(layout={self.layout}, dim={self.dim})"


def hermiticity_error(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))


def identity(layout: Layout) -> Operator:
    return Operator(layout, np.eye(layout.dim), hermitian=True)


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


@dataclass(frozen=True, eq=False)
class PureState:
    layout: Layout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.layout.dim,):
            raise LayoutError(f"state of shape {amps.shape} does not fit layout dim {self.layout.dim}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))

    def table(self) -> np.ndarray:
        """Amplitudes as a (battery level, photon number) table; joint layouts only."""
        if not isinstance(self.layout, JointSpace):
            raise LayoutError("table() needs a joint layout")
        return self.amplitudes.reshape(self.layout.shape)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    layout: Layout
    data: np.ndarray

    def __post_init__(self):
        data = _frozen(self.data)
        if data.shape != (self.layout.dim, self.layout.dim):
            raise LayoutError(f"density matrix of shape {data.shape} does not fit layout dim {self.layout.dim}")
        object.__setattr__(self, "data", data)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def eigenvalues(self) -> np.ndarray:
        h = 0.5 * (self.data + self.data.conj().T)
        return np.linalg.eigvalsh(h)

    def diagnostics(self) -> dict[str, float]:
        """Trace error, Hermiticity error and smallest eigenvalue (computed once)."""
        cached = self.__dict__.get("_diagnostics")
        if cached is None:
            cached = {
                "trace_err": abs(self.trace - 1.0),
                "herm_err": hermiticity_error(self.data),
                "min_eig": float(self.eigenvalues()[0]),
            }
            object.__setattr__(self, "_diagnostics", cached)
        return dict(cached)

    def validate(self, trace_tol=1e-8, herm_tol=1e-10, eig_tol=1e-10) -> None:
        d = self.diagnostics()
        if d["trace_err"] > trace_tol or d["herm_err"] > herm_tol or d["min_eig"] < -eig_tol:
            raise ValueError(f"not a valid density matrix: {d}")


class SpinOps(NamedTuple):
    Sz: Operator
    Sp: Operator
    Sm: Operator
    Sx: Operator


class FockOps(NamedTuple):
    c: Operator
    cdag: Operator
    num: Operator


def collective_spin_ops(sector: SpinSector) -> SpinOps:
    """Collective operators S_z, S_+, S_-, S_x on the symmetric sector.

    S_+|S,m> = sqrt(S(S+1) - m(m+1)) |S,m+1>.
    """
    if not isinstance(sector, SpinSector):
        raise InvalidSectorError(f"expected a SpinSector, got {type(sector).__name__}")
    s = sector.spin
    m = sector.m_values
    ladder = np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] + 1))
    sp = np.diag(ladder, -1)
    sz = Operator(sector, np.diag(m), hermitian=True)
    Sp = Operator(sector, sp)
    Sm = Operator(sector, sp.T)
    Sx = Operator(sector, 0.5 * (sp + sp.T), hermitian=True)
    return SpinOps(sz, Sp, Sm, Sx)


def fock_ops(space: FockSpace) -> FockOps:
    if space.n_max < 1:
        raise LayoutError("fock_ops needs n_max >= 1")
    c = np.diag(np.sqrt(np.arange(1, space.dim)), 1)
    return FockOps(
        Operator(space, c),
        Operator(space, c.T),
        Operator(space, np.diag(np.arange(space.dim)), hermitian=True),
    )


def tensor(a: Operator, b: Operator, joint: JointSpace | None = None) -> Operator:
    """Kronecker product of a battery operator and a charger operator."""
    if not isinstance(a.layout, SpinSector) or not isinstance(b.layout, FockSpace):
        raise LayoutError("tensor expects (spin operator, fock operator)")
    layout = JointSpace(a.layout, b.layout)
    if joint is not None and joint != layout:
        raise LayoutError(f"factors {layout} do not match {joint}")
    return Operator(layout, np.kron(a.data, b.data), a.hermitian and b.hermitian)


def embed_battery(op: Operator, joint: JointSpace) -> Operator:
    return tensor(op, identity(joint.fock), joint)


def embed_charger(op: Operator, joint: JointSpace) -> Operator:
    return tensor(identity(joint.spin), op, joint)


def basis_state(layout: Layout, m_index: int, n: int | None = None) -> PureState:
    """Joint basis vector |m_index, n>; battery- and charger-only layouts take one label."""
    amps = np.zeros(layout.dim, dtype=complex)
    if isinstance(layout, JointSpace):
        if n is None:
            raise LayoutError("joint basis state needs a photon number")
        amps[layout.index(m_index, n)] = 1.0
    elif isinstance(layout, SpinSector):
        if n is not None:
            raise LayoutError("battery-only layout takes no photon number")
        if not (0 <= m_index <= layout.n_cells):
            raise LayoutError(f"m_index {m_index} outside 0..{layout.n_cells}")
        amps[m_index] = 1.0
    elif isinstance(layout, FockSpace):
        # a lone label on a charger layout is the photon number
        if n is not None:
            raise LayoutError("charger-only layout takes a single label")
        if not (0 <= m_index <= layout.n_max):
            raise LayoutError(f"photon number {m_index} outside 0..{layout.n_max}")
        amps[m_index] = 1.0
    else:
        raise LayoutError(f"basis_state does not support {type(layout).__name__}")
    return PureState(layout, amps)


def _joint_of(state) -> JointSpace:
    if not isinstance(state.layout, JointSpace):
        raise LayoutError(f"partial trace needs a joint layout, got {state.layout}")
    return state.layout


def partial_trace_battery(state: PureState | DensityMatrix) -> DensityMatrix:
    """Reduced battery state, tracing out the charger."""
    joint = _joint_of(state)
    if isinstance(state, PureState):
        table = state.table()
        return DensityMatrix(joint.spin, table @ table.conj().T)
    d1, d2 = joint.shape
    return DensityMatrix(joint.spin, np.einsum("injn->ij", state.data.reshape(d1, d2, d1, d2)))


def partial_trace_charger(state: PureState | DensityMatrix) -> DensityMatrix:
    """Reduced charger state, tracing out the battery."""
    joint = _joint_of(state)
    if isinstance(state, PureState):
        table = state.table()
        return DensityMatrix(joint.fock, table.T @ table.conj())
    d1, d2 = joint.shape
    return DensityMatrix(joint.fock, np.einsum("mimj->ij", state.data.reshape(d1, d2, d1, d2)))


def uniform_superposition(sector: SpinSector) -> PureState:
    """sum_m |N/2, m> / sqrt(N + 1), the maximally coherent battery state."""
    return PureState(sector, np.full(sector.dim, 1 / np.sqrt(sector.dim)))
