"""Integer-order Bessel functions of the first kind.

Self-contained evaluation: ascending power series for small arguments and
Miller's backward recurrence, normalised with J_0 + 2 sum_k J_2k = 1,
everywhere else. Validated for |order| <= 200 and |x| <= 100.
"""
from __future__ import annotations

import math
from numbers import Integral

import numpy as np
from scipy.optimize import brentq

MAX_ORDER = 200
MAX_ARG = 100.0
MAX_ZERO_INDEX = 20

_SERIES_MAX_ARG = 1.0
_RESCALE = 1e250


def _series(orders: int, x: float) -> np.ndarray:
    # J_n(x) = sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)
    half = 0.5 * x
    q = -half * half
    out = np.zeros(orders + 1)
    for n in range(orders + 1):
        if n and half == 0.0:
            # subnormal x: only J_0 = 1 survives
            break
        log_lead = (n * math.log(half) if n else 0.0) - math.lgamma(n + 1)
        if log_lead < -745.0:
            break
        term = math.exp(log_lead)
        total = term
        k = 0
        while abs(term) > 1e-17 * abs(total):
            k += 1
            term *= q / (k * (k + n))
            total += term
        out[n] = total
    return out


def _miller(orders: int, x: float) -> np.ndarray:
    top = max(orders, int(x))
    start = top + 30 + int(10 * math.sqrt(top + 1))
    start += start % 2
    vals = np.zeros(max(orders, start) + 2)
    hi, cur = 0.0, 1e-30
    vals[start] = cur
    for k in range(start, 0, -1):
        lower = (2 * k / x) * cur - hi
        hi, cur = cur, lower
        vals[k - 1] = cur
        if abs(cur) > _RESCALE:
            vals[k - 1:] /= _RESCALE
            hi /= _RESCALE
            cur /= _RESCALE
    norm = vals[0] + 2.0 * vals[2:start + 1:2].sum()
    return vals[:orders + 1] / norm


def bessel_j_orders(max_order: int, x: float) -> np.ndarray:
    """J_0(x) .. J_max_order(x) from a single recurrence sweep."""
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    x = float(x)
    ax = abs(x)
    if ax == 0.0:
        out = np.zeros(max_order + 1)
        out[0] = 1.0
        return out
    out = _series(max_order, ax) if ax <= _SERIES_MAX_ARG else _miller(max_order, ax)
    if x < 0:
        out[1::2] *= -1.0
    return out


def bessel_j(order: int, x: float) -> float:
    """First-kind Bessel function J_order(x) for integer order."""
    if not isinstance(order, Integral) or isinstance(order, bool):
        raise TypeError(f"order must be an integer, got {order!r}")
    if abs(order) > MAX_ORDER or not abs(x) <= MAX_ARG:
        raise ValueError(
            f"bessel_j validated for |order| <= {MAX_ORDER}, |x| <= {MAX_ARG}; got ({order}, {x})")
    n = abs(int(order))
    value = float(bessel_j_orders(n, x)[n])
    if order < 0 and n % 2:
        value = -value
    return value


def bessel_j0_zero(k: int) -> float:
    """k-th positive root of J_0, located by bracketing around McMahon's estimate."""
    if not isinstance(k, Integral) or not 1 <= k <= MAX_ZERO_INDEX:
        raise ValueError(f"zero index must be an integer in 1..{MAX_ZERO_INDEX}, got {k!r}")
    beta = (k - 0.25) * math.pi
    guess = beta + 1.0 / (8.0 * beta)
    return brentq(lambda z: bessel_j(0, z), guess - 0.3, guess + 0.3, xtol=1e-15, rtol=1e-15)


def jacobi_anger_sum(xi: float, phase: float, cutoff: int | None = None) -> complex:
    """Truncated sum_n J_n(xi) e^{i n phase}, which converges to e^{i xi sin(phase)}."""
    cutoff = sideband_cutoff(xi) if cutoff is None else cutoff
    j = bessel_j_orders(cutoff, xi)
    n = np.arange(1, cutoff + 1)
    # J_{-n} = (-1)^n J_n
    tail = j[1:] * (np.exp(1j * n * phase) + (-1.0) ** n * np.exp(-1j * n * phase))
    return complex(j[0] + tail.sum())


def sideband_cutoff(xi: float) -> int:
    """Number of sidebands kept on each side: ceil(|xi|) + 20."""
    return int(math.ceil(abs(xi))) + 20
