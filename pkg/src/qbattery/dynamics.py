"""Fixed-step fourth-order propagators for pure states, amplitude tables and
Lindblad master equations.

All propagators use classical RK4 with a step no larger than
``min(grid.dt_max, STEP_SAFETY / ||generator||)``. Each output interval is
split into equal sub-steps, so sample times are hit exactly and results are
bit-for-bit reproducible. Nothing is renormalised: norm, trace, Hermiticity
and positivity are checked at every sample and violations raise
``AccuracyError``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from .errors import AccuracyError, LayoutError, TruncationError
from .hilbert import DensityMatrix, Operator, PureState
from .model import ModulationParams, SystemParams, TimeDependentHamiltonian

STEP_SAFETY = 0.05
NORM_TOL = 1e-8
LEAK_TOL = 1e-6

# largest Hilbert dimension for which a Lindbladian is integrated as a
# dense superoperator
_SUPEROP_MAX_DIM = 40


@dataclass(frozen=True)
class TimeGrid:
    """Output samples ``linspace(t0, t1, n_samples)``; ``dt_max`` caps the RK4 step."""

    t0: float
    t1: float
    n_samples: int
    dt_max: float | None = None

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("time grid needs t1 > t0")
        if self.n_samples < 2:
            raise ValueError("time grid needs at least two samples")
        if self.dt_max is not None and not self.dt_max > 0:
            raise ValueError("dt_max must be positive")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_samples)

    def step(self, generator_norm: float, safety: float = STEP_SAFETY) -> float:
        dt = self.t1 - self.t0
        if generator_norm > 0:
            dt = min(dt, safety / generator_norm)
        if self.dt_max is not None:
            dt = min(dt, self.dt_max)
        return dt


@dataclass(frozen=True, eq=False)
class LindbladSpec:
    """Generator -i[H, rho] + sum_k rate_k D[O_k](rho).

    ``hamiltonian`` may be a static ``Operator``, a ``TimeDependentHamiltonian``
    or None.
    """

    layout: object
    hamiltonian: Operator | TimeDependentHamiltonian | None = None
    jumps: tuple[tuple[Operator, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "jumps", tuple((op, float(rate)) for op, rate in self.jumps))
        if self.hamiltonian is not None and self.hamiltonian.layout != self.layout:
            raise LayoutError("Hamiltonian layout does not match the LindbladSpec layout")
        for op, rate in self.jumps:
            if op.layout != self.layout:
                raise LayoutError("jump operator layout does not match the LindbladSpec layout")
            if not rate >= 0:
                raise ValueError(f"jump rates must be non-negative, got {rate}")

    @property
    def is_static(self) -> bool:
        h = self.hamiltonian
        return not (isinstance(h, TimeDependentHamiltonian) and not h.is_static)

    def hamiltonian_matrix(self, t: float) -> np.ndarray | None:
        h = self.hamiltonian
        if h is None:
            return None
        if isinstance(h, TimeDependentHamiltonian):
            return h.matrix(t)
        return h.data

    def norm_bound(self) -> float:
        """Bound on the norm of the generator as a superoperator; sets the RK4 step.

        The commutator with H contributes 2||H||. A step based on ||H|| alone
        lets zero eigenvalues of rank-deficient states drift below -1e-8.
        """
        h = self.hamiltonian
        total = 0.0
        if isinstance(h, TimeDependentHamiltonian):
            total += 2 * h.norm_bound()
        elif h is not None:
            total += 2 * np.linalg.norm(h.data, 2)
        for op, rate in self.jumps:
            total += 2 * rate * np.linalg.norm(op.data, 2) ** 2
        return float(total)


def _rk4_matrix(generator: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for dy/dt = G y, written as a matrix polynomial."""
    a = h * generator
    out = np.eye(len(a), dtype=complex)
    term = np.eye(len(a), dtype=complex)
    for k in range(1, 5):
        term = term @ a / k
        out = out + term
    return out


def _substeps(t_a: float, t_b: float, dt: float, breakpoints: Sequence[float]):
    """Yield (start, stop, n_steps, nudge_start, nudge_stop) pieces covering [t_a, t_b]."""
    cuts = [b for b in breakpoints if t_a < b < t_b]
    edges = [t_a, *cuts, t_b]
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil((hi - lo) / dt - 1e-9))
        yield lo, hi, n, lo in breakpoints, hi in breakpoints


def _rk4_interval(f, t_lo, t_hi, n, y, nudge_lo, nudge_hi):
    h = (t_hi - t_lo) / n
    for k in range(n):
        t = t_lo + k * h
        t_end = t_lo + (k + 1) * h if k + 1 < n else t_hi
        ta = math.nextafter(t, math.inf) if (k == 0 and nudge_lo) else t
        tb = math.nextafter(t_end, -math.inf) if (k + 1 == n and nudge_hi) else t_end
        k1 = f(ta, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(tb, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _integrate(f, y0, grid: TimeGrid, dt: float, *, static_generator=None,
               breakpoints=(), check=None):
    """Drive RK4 across the output grid; ``check(t, y)`` returns True to stop early."""
    times = grid.times
    y = np.array(y0, dtype=complex)
    out = [(float(times[0]), y.copy())]
    if check is not None and check(times[0], y):
        return out
    cache: dict[tuple[float, int], np.ndarray] = {}
    for t_a, t_b in zip(times[:-1], times[1:]):
        for lo, hi, n, nlo, nhi in _substeps(t_a, t_b, dt, breakpoints):
            if static_generator is not None:
                h = (hi - lo) / n
                key = (round(h, 15), n)
                if key not in cache:
                    cache[key] = _rk4_matrix(static_generator, h)
                step = cache[key]
                for _ in range(n):
                    y = step @ y
            else:
                y = _rk4_interval(f, lo, hi, n, y, nlo, nhi)
        out.append((float(t_b), y.copy()))
        if check is not None and check(t_b, y):
            break
    return out


def _as_td(h, layout, grid: TimeGrid) -> tuple[Callable, float, object, tuple]:
    """Normalise a Hamiltonian argument to (apply(t, psi), norm bound, static matrix, breakpoints)."""
    if isinstance(h, TimeDependentHamiltonian):
        if h.layout != layout:
            raise LayoutError(f"Hamiltonian layout {h.layout} does not match state layout {layout}")
        static = np.asarray(h.static, dtype=complex) if h.is_static else None
        return h.apply, h.norm_bound(), static, h.breakpoints
    if isinstance(h, Operator):
        if h.layout != layout:
            raise LayoutError(f"Hamiltonian layout {h.layout} does not match state layout {layout}")
        return (lambda t, psi: h.data @ psi), float(np.linalg.norm(h.data, 2)), h.data, ()

    # generic callable: bound ||H|| by sampling the output grid and its midpoints
    def apply(t, psi):
        op = h(t)
        if op.layout != layout:
            raise LayoutError(f"Hamiltonian layout {op.layout} does not match state layout {layout}")
        return op.data @ psi

    ts = grid.times
    probes = np.concatenate([ts, 0.5 * (ts[:-1] + ts[1:])])
    bound = max(np.linalg.norm(h(t).data, 2) for t in probes)
    return apply, float(bound), None, ()


def propagate_state(h, psi0: PureState, grid: TimeGrid, *,
                    monitor: Callable[[float, PureState], bool] | None = None,
                    norm_tol: float = NORM_TOL,
                    safety: float = STEP_SAFETY) -> list[tuple[float, PureState]]:
    """Solve i d|psi>/dt = H(t)|psi> with fixed-step RK4.

    Parameters
    ----------
    h : TimeDependentHamiltonian, Operator or callable ``t -> Operator``
    psi0 : normalised initial state on the same layout
    grid : output samples and step cap
    monitor : optional ``monitor(t, state) -> bool``; returning True stops the
        run after that sample (the returned trajectory ends there)

    Raises
    ------
    AccuracyError
        if | ||psi|| - 1 | exceeds ``norm_tol`` at any sample.
    """
    layout = psi0.layout
    if abs(psi0.norm - 1.0) > norm_tol:
        raise ValueError(f"initial state is not normalised (norm {psi0.norm})")
    apply, bound, static, breaks = _as_td(h, layout, grid)
    dt = grid.step(bound, safety)
    static_gen = -1j * static if static is not None else None

    def f(t, y):
        return -1j * apply(t, y)

    def check(t, y):
        drift = abs(np.linalg.norm(y) - 1.0)
        if drift > norm_tol:
            raise AccuracyError(
                f"norm drift {drift:.3g} at t={t:.6g} exceeds {norm_tol:g}; reduce dt_max")
        return monitor is not None and monitor(t, PureState(layout, y))

    raw = _integrate(f, psi0.amplitudes, grid, dt, static_generator=static_gen,
                     breakpoints=breaks, check=check)
    return [(t, PureState(layout, y)) for t, y in raw]


def _ladder_factors(N: int) -> np.ndarray:
    # S+ |k> = u_k |k+1>, k = 0..N-1, with M_k = -N/2 + k
    s = N / 2
    mk = np.arange(N) - s
    return np.sqrt(s * (s + 1) - mk * (mk + 1))


def propagate_amplitudes(p: SystemParams, m: ModulationParams, grid: TimeGrid, *,
                         leak_tol: float = LEAK_TOL,
                         norm_tol: float = NORM_TOL,
                         safety: float = STEP_SAFETY,
                         monitor: Callable[[float, np.ndarray], bool] | None = None,
                         ) -> list[tuple[float, np.ndarray]]:
    """Integrate the amplitude equations for d[m, n] from d[0, N] = 1.

    Rotating couplings link (m, n) with (m +- 1, n -+ 1) at strength
    g/2 * sqrt-ladder factors; counter-rotating couplings link (m, n) with
    (m +- 1, n +- 1) at strength g/2 * J0(2 xi) with phases e^{-+2i w0 t}.
    Works directly on the (N + 1, n_max + 1) table without building matrices.

    Raises
    ------
    TruncationError
        if the population of the two highest Fock levels exceeds ``leak_tol``.
    AccuracyError
        on norm drift beyond ``norm_tol``.
    """
    N, n_max = p.N, p.n_max
    if n_max < N:
        raise TruncationError(f"n_max={n_max} cannot hold the initial Fock state |{N}>")
    u = _ladder_factors(N)[:, None]          # couples row k and k+1
    sq = np.sqrt(np.arange(1, n_max + 1))[None, :]  # sqrt(n) for n = 1..n_max
    half_g = 0.5 * p.g
    cr = half_g * m.cr_factor
    w0 = p.omega0

    def rhs(t, d):
        out = np.zeros_like(d)
        # rotating: S+ c and S- c^dag
        out[1:, :-1] += u * sq * d[:-1, 1:]
        out[:-1, 1:] += u * sq * d[1:, :-1]
        out *= half_g
        if cr != 0.0:
            ph = np.exp(-2j * w0 * t)
            tmp = np.zeros_like(d)
            # S- c e^{-2i w0 t}: d[k+1, n+1] -> (k, n)
            tmp[:-1, :-1] += ph * (u * sq * d[1:, 1:])
            # S+ c^dag e^{+2i w0 t}: d[k, n-1] -> (k+1, n)
            tmp[1:, 1:] += ph.conjugate() * (u * sq * d[:-1, :-1])
            out += cr * tmp
        return -1j * out

    bound = 2 * (half_g + abs(cr)) * (u.max() if N else 0.0) * math.sqrt(n_max)
    dt = grid.step(bound, safety)

    def check(t, d):
        drift = abs(math.sqrt(np.sum(np.abs(d) ** 2)) - 1.0)
        if drift > norm_tol:
            raise AccuracyError(f"norm drift {drift:.3g} at t={t:.6g}; reduce dt_max")
        top = float(np.sum(np.abs(d[:, -2:]) ** 2))
        if top > leak_tol:
            raise TruncationError(
                f"population {top:.3g} in the top two Fock levels at t={t:.6g}; raise n_max")
        return monitor is not None and monitor(t, d)

    d0 = np.zeros((N + 1, n_max + 1), dtype=complex)
    d0[0, N] = 1.0
    return _integrate(rhs, d0, grid, dt, check=check)


class _LindbladKernel:
    """Sparse factors of a Lindblad generator for repeated right-hand sides."""

    def __init__(self, spec: LindbladSpec, hermitian_input: bool = False):
        self.hermitian_input = hermitian_input
        h = spec.hamiltonian
        self.td = h if isinstance(h, TimeDependentHamiltonian) and not h.is_static else None
        if h is None or self.td is not None:
            self.h = None
        else:
            self.h = sparse.csr_matrix(h.static if isinstance(h, TimeDependentHamiltonian) else h.data)
        self.jumps = []
        for op, rate in spec.jumps:
            if rate == 0.0:
                continue
            o = sparse.csr_matrix(op.data)
            od = o.conj().T.tocsr()
            self.jumps.append((rate, o, od, (od @ o).tocsr()))

    def _h_times(self, t, x):
        if self.td is not None:
            return self.td.apply(t, x)
        return self.h @ x

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        # RK4 stages started from a Hermitian rho stay Hermitian, so
        # rho X = (X rho)^dag for Hermitian X; this halves the sparse products
        herm = self.hermitian_input
        out = np.zeros(rho.shape, dtype=complex)
        if self.h is not None or self.td is not None:
            hr = self._h_times(t, rho)
            right = hr.conj().T if herm else self._h_times(t, rho.conj().T).conj().T
            out += -1j * (hr - right)
        for rate, o, od, ood in self.jumps:
            o_rho = o @ rho
            if herm:
                # O rho O^dag = O (O rho)^dag
                x = ood @ rho
                out += rate * (o @ o_rho.conj().T - 0.5 * (x + x.conj().T))
            else:
                out += rate * ((od.T @ o_rho.T).T - 0.5 * (ood @ rho + (ood.T @ rho.T).T))
        return out


def lindblad_rhs(spec: LindbladSpec, rho, t: float = 0.0) -> np.ndarray:
    """-i[H, rho] + sum_k rate_k (O rho O^dag - {O^dag O, rho}/2)."""
    if isinstance(rho, DensityMatrix):
        if rho.layout != spec.layout:
            raise LayoutError("density matrix layout does not match the Lindblad spec")
        rho = rho.data
    return _LindbladKernel(spec)(t, np.asarray(rho, dtype=complex))


def lindblad_superoperator(spec: LindbladSpec, t: float = 0.0) -> np.ndarray:
    """Matrix of the generator acting on row-major vec(rho)."""
    d = spec.layout.dim
    eye = np.eye(d)
    out = np.zeros((d * d, d * d), dtype=complex)
    h = spec.hamiltonian_matrix(t)
    if h is not None:
        out += -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op, rate in spec.jumps:
        if rate == 0.0:
            continue
        o = op.data
        ood = o.conj().T @ o
        out += rate * (np.kron(o, o.conj()) - 0.5 * (np.kron(ood, eye) + np.kron(eye, ood.T)))
    return out


def propagate_lindblad(spec: LindbladSpec, rho0: DensityMatrix, grid: TimeGrid, *,
                       monitor: Callable[[float, DensityMatrix], bool] | None = None,
                       trace_tol: float = NORM_TOL,
                       herm_tol: float = 1e-10,
                       eig_tol: float = 1e-8,
                       safety: float = STEP_SAFETY) -> list[tuple[float, DensityMatrix]]:
    """Integrate a Lindblad master equation with fixed-step RK4.

    Every sample is checked for trace (``trace_tol``), Hermiticity
    (``herm_tol``) and smallest eigenvalue (``>= -eig_tol``); a violation
    raises ``AccuracyError``.
    """
    layout = spec.layout
    if rho0.layout != layout:
        raise LayoutError("initial density matrix layout does not match the Lindblad spec")
    rho0.validate(trace_tol=trace_tol, herm_tol=herm_tol, eig_tol=eig_tol)
    d = layout.dim
    dt = grid.step(spec.norm_bound(), safety)

    use_superop = spec.is_static and d <= _SUPEROP_MAX_DIM
    if use_superop:
        y0 = rho0.data.reshape(-1)
        static = lindblad_superoperator(spec)

        def f(t, y):
            return static @ y

        def unpack(y):
            return y.reshape(d, d)
    else:
        y0 = rho0.data
        static = None
        f = _LindbladKernel(spec, hermitian_input=True)

        def unpack(y):
            return y

    breaks = spec.hamiltonian.breakpoints if isinstance(spec.hamiltonian, TimeDependentHamiltonian) else ()

    def check(t, y):
        rho = DensityMatrix(layout, unpack(y))
        diag = rho.diagnostics()
        if diag["trace_err"] > trace_tol or diag["herm_err"] > herm_tol or diag["min_eig"] < -eig_tol:
            raise AccuracyError(f"density matrix invariants violated at t={t:.6g}: {diag}")
        return monitor is not None and monitor(t, rho)

    raw = _integrate(f, y0, grid, dt, static_generator=static, breakpoints=breaks, check=check)
    return [(t, DensityMatrix(layout, unpack(y))) for t, y in raw]
