"""Energetic and information-theoretic observables of the battery state."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import LayoutError
from .hilbert import DensityMatrix, Operator

IMAG_TOL = 1e-10
NEG_EIG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigen-decomposition of a Hermitian operator, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def of(cls, h: Operator) -> Spectrum:
        _require_hermitian(h)
        vals, vecs = np.linalg.eigh(h.data)
        return cls(vals, vecs)


def _require_hermitian(h: Operator) -> None:
    if not h.is_hermitian():
        raise ValueError("observable Hamiltonian must be Hermitian")


def _check_layouts(rho: DensityMatrix, h: Operator) -> None:
    if rho.layout != h.layout:
        raise LayoutError(f"state layout {rho.layout} does not match operator layout {h.layout}")


def mean_energy(rho: DensityMatrix, h: Operator) -> float:
    """Tr[rho H]."""
    _check_layouts(rho, h)
    _require_hermitian(h)
    value = np.einsum("ij,ji->", rho.data, h.data)
    if abs(value.imag) > IMAG_TOL:
        raise ValueError(f"mean energy has imaginary part {value.imag:.3g}; is rho Hermitian?")
    return float(value.real)


def _state_eigenvalues(rho: DensityMatrix) -> np.ndarray:
    """Eigenvalues of rho in descending order, checked and clamped to [0, 1]."""
    r = rho.eigenvalues()[::-1]
    if r[-1] < -NEG_EIG_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {r[-1]:.3g}")
    return np.clip(r, 0.0, 1.0)


def passive_state(rho: DensityMatrix, h: Operator) -> DensityMatrix:
    """Populations of rho, sorted descending, placed on energy levels sorted ascending."""
    _check_layouts(rho, h)
    spec = Spectrum.of(h)
    r = _state_eigenvalues(rho)
    v = spec.eigenvectors
    return DensityMatrix(rho.layout, (v * r) @ v.conj().T)


def ergotropy(rho: DensityMatrix, h: Operator) -> float:
    """Maximal work extractable by a unitary: Tr[rho H] - Tr[passive(rho) H]."""
    _check_layouts(rho, h)
    spec = Spectrum.of(h)
    r = _state_eigenvalues(rho)
    value = mean_energy(rho, h) - float(r @ spec.eigenvalues)
    if value < 0.0:
        if value < -NEG_EIG_TOL * max(1.0, float(np.max(np.abs(spec.eigenvalues)))):
            raise ValueError(f"negative ergotropy {value:.3g}: inconsistent input")
        return 0.0
    return value


def efficiency(erg: float, charger0: DensityMatrix, h_c: Operator) -> float:
    """Ergotropy over the charger's initial energy Tr[rho_c(0) H_c]."""
    supply = mean_energy(charger0, h_c)
    if not supply > 0:
        raise ValueError(f"initial charger energy must be positive, got {supply}")
    return erg / supply


def _entropy_of(p: np.ndarray, base: float) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)) / math.log(base))


def vn_entropy(rho: DensityMatrix, base: float = math.e) -> float:
    """Von Neumann entropy -sum r log r, with 0 log 0 = 0."""
    return _entropy_of(_state_eigenvalues(rho), base)


def dephased(rho: DensityMatrix, h: Operator) -> DensityMatrix:
    """rho with its off-diagonal elements in the eigenbasis of h removed."""
    _check_layouts(rho, h)
    v = Spectrum.of(h).eigenvectors
    pops = np.real(np.einsum("ki,kl,li->i", v.conj(), rho.data, v))
    return DensityMatrix(rho.layout, (v * pops) @ v.conj().T)


def rel_entropy_coherence(rho: DensityMatrix, h: Operator, base: float = math.e) -> float:
    """Relative-entropy coherence S(dephased rho) - S(rho) in the eigenbasis of h."""
    _check_layouts(rho, h)
    v = Spectrum.of(h).eigenvectors
    pops = np.real(np.einsum("ki,kl,li->i", v.conj(), rho.data, v))
    value = _entropy_of(np.clip(pops, 0.0, 1.0), base) - vn_entropy(rho, base)
    if value < -NEG_EIG_TOL:
        raise ValueError(f"negative coherence {value:.3g}: inconsistent input")
    return max(value, 0.0)


class Peak(NamedTuple):
    t: float
    value: float
    index: int
    monotone: bool


def _prominence(v: np.ndarray, i: int) -> float:
    """Topographic prominence of sample i within the sampled series."""
    higher_left = np.nonzero(v[:i] > v[i])[0]
    left = v[higher_left[-1] + 1:i] if higher_left.size else v[:i]
    higher_right = np.nonzero(v[i + 1:] > v[i])[0]
    right = v[i + 1:i + 1 + higher_right[0]] if higher_right.size else v[i + 1:]
    left_min = left.min() if left.size else v[i]
    right_min = right.min() if right.size else v[i]
    return float(v[i] - max(left_min, right_min))


def _refine(t: np.ndarray, v: np.ndarray, i: int) -> tuple[float, float]:
    """Vertex of the parabola through samples i-1, i, i+1 (kept inside that bracket)."""
    ts, vs = t[i - 1:i + 2], v[i - 1:i + 2]
    a, b, c = np.polyfit(ts - ts[1], vs, 2)
    if not a < 0:
        return float(t[i]), float(v[i])
    x = -b / (2 * a)
    x = min(max(x, ts[0] - ts[1]), ts[2] - ts[1])
    return float(ts[1] + x), float(a * x * x + b * x + c)


def first_local_max(series, *, atol: float = 1e-12, min_prominence: float = 0.0) -> Peak:
    """First local maximum of a sampled series, refined by quadratic interpolation.

    ``series`` is a sequence of ``(t, value)`` pairs or a pair of arrays.
    Differences no larger than ``atol`` count as flat, so a peak must rise
    strictly from its left neighbour and then stay level or fall; flat tops
    are resolved at their first sample. Maxima whose prominence is below
    ``min_prominence`` are skipped. Without any qualifying maximum the final
    sample is returned with ``monotone=True``.
    """
    t, v = _as_arrays(series)
    n = len(v)
    if n < 3:
        raise ValueError("first_local_max needs at least 3 samples")
    i = 1
    while i < n - 1:
        if v[i] - v[i - 1] > atol:
            j = i
            while j < n - 1 and abs(v[j + 1] - v[i]) <= atol:
                j += 1
            if j < n - 1 and v[j + 1] < v[i] - atol:
                if min_prominence <= 0 or _prominence(v, i) >= min_prominence:
                    if j == i:
                        tp, vp = _refine(t, v, i)
                    else:
                        tp, vp = float(t[i]), float(v[i])
                    return Peak(tp, vp, i, False)
            i = j + 1
        else:
            i += 1
    return Peak(float(t[-1]), float(v[-1]), n - 1, True)


def _as_arrays(series) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(series, tuple) and len(series) == 2 and np.ndim(series[0]) == 1:
        t, v = series
    else:
        pairs = np.asarray(list(series), dtype=float).reshape(-1, 2)
        t, v = pairs[:, 0], pairs[:, 1]
    return np.asarray(t, dtype=float), np.asarray(v, dtype=float)


def energy_diagonal_unitary(h: Operator, phases: Sequence[float]) -> Operator:
    """exp(-i sum_k phase_k |e_k><e_k|) in the eigenbasis of h."""
    v = Spectrum.of(h).eigenvectors
    return Operator(h.layout, (v * np.exp(-1j * np.asarray(phases))) @ v.conj().T)
