"""Storage-stage noise: spectral densities, modulation-engineered decay
rates and the collective dephasing / dissipation channels.

The modulation xi*nu*cos(nu t) splits the battery transition into sidebands
w0 + l*nu with weights J_l(xi)^2, so the collective decay rate becomes

    Gamma(xi, nu) = 2*pi * sum_l J_l(xi)^2 * D(w0 + l*nu).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_orders, sideband_cutoff
from .dynamics import LindbladSpec
from .hilbert import Operator, SpinSector, collective_spin_ops
from .model import ModulationParams


@dataclass(frozen=True)
class LorentzianSpectrum:
    """D(w) = Omega^2 lam / (2 pi [(w - w_a)^2 + (lam/2)^2]) for w > 0, else 0."""

    Omega: float
    lambda_w: float
    omega_a: float

    def __post_init__(self):
        if self.Omega < 0:
            raise ValueError("Omega must be non-negative")
        if not self.lambda_w > 0:
            raise ValueError("Lorentzian width must be positive")
        if not self.omega_a > 0:
            raise ValueError("Lorentzian centre must be positive")


@dataclass(frozen=True)
class DephasingChannel:
    gamma: float
    omega: float = 1.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("dephasing rate must be non-negative")


@dataclass(frozen=True)
class DissipationChannel:
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("dissipation rate must be non-negative")

    @classmethod
    def engineered(cls, m: ModulationParams, s: LorentzianSpectrum,
                   omega0: float = 1.0) -> DissipationChannel:
        return cls(effective_rate(m, s, omega0))


def spectral_density(s: LorentzianSpectrum, omega):
    """Lorentzian bath spectral density; zero on the non-positive frequency axis."""
    w = np.asarray(omega, dtype=float)
    value = s.Omega**2 * s.lambda_w / (2 * math.pi * ((w - s.omega_a) ** 2 + (s.lambda_w / 2) ** 2))
    value = np.where(w > 0, value, 0.0)
    return float(value) if value.ndim == 0 else value


def bare_rate(s: LorentzianSpectrum, omega0: float = 1.0) -> float:
    """Unmodulated decay rate 2 pi D(w0)."""
    return 2 * math.pi * spectral_density(s, omega0)


def effective_rate(m: ModulationParams, s: LorentzianSpectrum, omega0: float = 1.0,
                   cutoff: int | None = None) -> float:
    """Modulation-engineered collective decay rate Gamma(xi, nu).

    Sidebands |l| <= ``cutoff`` (default ceil(xi) + 20) are summed. With
    ``xi == 0`` or ``nu == 0`` the bare rate is returned exactly.
    """
    if m.xi == 0.0 or m.nu == 0.0:
        return bare_rate(s, omega0)
    cutoff = sideband_cutoff(m.xi) if cutoff is None else cutoff
    weights = bessel_j_orders(cutoff, m.xi) ** 2
    ls = np.arange(1, cutoff + 1)
    total = weights[0] * spectral_density(s, omega0)
    total += np.sum(weights[1:] * (spectral_density(s, omega0 + ls * m.nu)
                                   + spectral_density(s, omega0 - ls * m.nu)))
    return float(2 * math.pi * total)


def dephasing_spec(ch: DephasingChannel, sector: SpinSector) -> LindbladSpec:
    """rho' = -i[w Sz, rho] + gamma D[Sz](rho)."""
    sz = collective_spin_ops(sector).Sz
    return LindbladSpec(sector, Operator(sector, ch.omega * sz.data, hermitian=True),
                        ((sz, ch.gamma),))


def dissipation_spec(ch: DissipationChannel, sector: SpinSector) -> LindbladSpec:
    """rho' = Gamma D[S-](rho); interaction picture, Lamb shift neglected."""
    return LindbladSpec(sector, None, ((collective_spin_ops(sector).Sm, ch.rate),))
