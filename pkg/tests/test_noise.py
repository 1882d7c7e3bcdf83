import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbattery.bessel import sideband_cutoff
from qbattery.dynamics import TimeGrid, lindblad_rhs, propagate_lindblad
from qbattery.hilbert import DensityMatrix, SpinSector, basis_state, collective_spin_ops, uniform_superposition
from qbattery.model import ModulationParams, battery_hamiltonian
from qbattery.noise import (DephasingChannel, DissipationChannel, LorentzianSpectrum, bare_rate,
                            dephasing_spec, dissipation_spec, effective_rate, spectral_density)
from qbattery.observables import ergotropy

LORENTZ = LorentzianSpectrum(1.0, 4.0, 1.0)


def j0_squared(x):
    return float(mpmath.besselj(0, x)) ** 2


class TestSpectralDensity:
    def test_peak(self):
        s = LorentzianSpectrum(0.7, 3.0, 2.5)
        assert spectral_density(s, 2.5) == pytest.approx(2 * 0.7**2 / (math.pi * 3.0), rel=1e-15)

    @pytest.mark.parametrize("w", [-5.0, 0.0])
    def test_non_positive_frequencies_vanish(self, w):
        assert spectral_density(LORENTZ, w) == 0.0

    def test_reference_parameters_give_unit_rate(self):
        assert spectral_density(LORENTZ, 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
        assert bare_rate(LORENTZ) == pytest.approx(1.0, rel=1e-15)

    def test_vectorised(self):
        w = np.array([-1.0, 1.0, 3.0])
        np.testing.assert_allclose(spectral_density(LORENTZ, w), [spectral_density(LORENTZ, x) for x in w])

    @pytest.mark.parametrize("kw", [{"Omega": -1.0}, {"lambda_w": 0.0}, {"omega_a": 0.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            LorentzianSpectrum(**{"Omega": 1.0, "lambda_w": 1.0, "omega_a": 1.0, **kw})


class TestEffectiveRate:
    @pytest.mark.parametrize("nu", [0.0, 0.3, 7.0, 1e4])
    def test_unmodulated_is_bare_exactly(self, nu):
        assert effective_rate(ModulationParams(0.0, nu), LORENTZ) == bare_rate(LORENTZ)

    def test_zero_frequency_is_bare_exactly(self):
        assert effective_rate(ModulationParams(1.3, 0.0), LORENTZ) == bare_rate(LORENTZ)

    @pytest.mark.parametrize("xi", [0.5, 1.5, 2.404])
    def test_large_frequency_limit(self, xi):
        gamma = effective_rate(ModulationParams(xi, 1e4), LORENTZ)
        assert abs(gamma - j0_squared(xi) * bare_rate(LORENTZ)) < 1e-6

    def test_intermediate_ratio(self):
        ratio = effective_rate(ModulationParams(1.5, 1e4), LORENTZ) / bare_rate(LORENTZ)
        assert ratio == pytest.approx(j0_squared(1.5), abs=1e-6)
        assert ratio == pytest.approx(0.262, abs=1e-3)

    def test_first_zero_sideband_residue(self):
        # J0^2 vanishes; the l > 0 sidebands leave 2 pi sum J_l^2 D(1 + l nu), order 1e-8 at nu = 1e4
        zero = mpmath.besseljzero(0, 1)
        gamma = effective_rate(ModulationParams(float(zero), 1e4), LORENTZ)
        estimate = 2 * math.pi * sum(float(mpmath.besselj(l, zero)) ** 2 * spectral_density(LORENTZ, 1 + l * 1e4)
                                     for l in range(1, 30))
        assert gamma == pytest.approx(estimate, rel=1e-6)
        assert gamma < 1e-7

    def test_against_direct_sum(self):
        m = ModulationParams(1.1, 2.5)
        direct = 2 * math.pi * sum(float(mpmath.besselj(l, 1.1)) ** 2 * spectral_density(LORENTZ, 1 + l * 2.5)
                                   for l in range(-40, 41))
        assert effective_rate(m, LORENTZ) == pytest.approx(direct, rel=1e-12)

    @pytest.mark.parametrize("xi,nu", [(0.5, 0.7), (2.404, 3.0), (4.0, 1e3)])
    def test_cutoff_converged(self, xi, nu):
        m = ModulationParams(xi, nu)
        base = effective_rate(m, LORENTZ)
        assert abs(effective_rate(m, LORENTZ, cutoff=2 * sideband_cutoff(xi)) - base) < 1e-12

    @pytest.mark.parametrize("xi", [0.5, 1.5, 2.404])
    def test_monotone_beyond_width(self, xi):
        nus = np.geomspace(LORENTZ.lambda_w, 1e4, 40)
        rates = [effective_rate(ModulationParams(xi, nu), LORENTZ) for nu in nus]
        assert np.all(np.diff(rates) < 0)

    @given(st.floats(0.0, 6.0), st.floats(0.0, 1e4), st.floats(0.0, 3.0), st.floats(0.1, 10.0),
           st.floats(0.1, 5.0))
    @settings(max_examples=100, deadline=None)
    def test_non_negative(self, xi, nu, omega, lam, centre):
        assert effective_rate(ModulationParams(xi, nu), LorentzianSpectrum(omega, lam, centre)) >= 0.0

    def test_engineered_channel(self):
        ch = DissipationChannel.engineered(ModulationParams(1.5, 1e4), LORENTZ)
        assert ch.rate == effective_rate(ModulationParams(1.5, 1e4), LORENTZ)


class TestChannels:
    def test_dephasing_structure(self):
        sector = SpinSector(4)
        spec = dephasing_spec(DephasingChannel(0.3, 1.7), sector)
        sz = collective_spin_ops(sector).Sz.data
        np.testing.assert_allclose(spec.hamiltonian.data, 1.7 * sz)
        (jump, rate), = spec.jumps
        np.testing.assert_allclose(jump.data, sz)
        assert rate == 0.3

    def test_dissipation_structure(self):
        sector = SpinSector(4)
        spec = dissipation_spec(DissipationChannel(0.2), sector)
        assert spec.hamiltonian is None
        (jump, rate), = spec.jumps
        np.testing.assert_allclose(jump.data, collective_spin_ops(sector).Sm.data)
        assert rate == 0.2

    @pytest.mark.parametrize("bad", [lambda: DephasingChannel(-0.1), lambda: DissipationChannel(-1.0)])
    def test_negative_rates(self, bad):
        with pytest.raises(ValueError):
            bad()

    def test_dephasing_keeps_populations(self):
        sector = SpinSector(5)
        rng = np.random.default_rng(3)
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho = DensityMatrix(sector, a @ a.conj().T / np.trace(a @ a.conj().T))
        d = lindblad_rhs(dephasing_spec(DephasingChannel(1.3), sector), rho)
        assert np.max(np.abs(np.diagonal(d))) < 1e-12

    def test_incoherent_dicke_state_is_dephasing_fixed_point(self):
        sector = SpinSector(8)
        rho = basis_state(sector, 4).to_density()
        assert np.max(np.abs(lindblad_rhs(dephasing_spec(DephasingChannel(2.0), sector), rho))) == 0.0

    def test_ground_state_is_dissipation_fixed_point(self):
        sector = SpinSector(6)
        ground = basis_state(sector, 0).to_density()
        spec = dissipation_spec(DissipationChannel(0.5), sector)
        assert np.max(np.abs(lindblad_rhs(spec, ground))) == 0.0
        # every other Dicke state decays
        for k in range(1, 7):
            assert np.abs(lindblad_rhs(spec, basis_state(sector, k).to_density())).max() > 0

    def test_dissipation_relaxes_to_ground(self):
        sector = SpinSector(3)
        spec = dissipation_spec(DissipationChannel(1.0), sector)
        traj = propagate_lindblad(spec, uniform_superposition(sector).to_density(), TimeGrid(0, 20, 3))
        np.testing.assert_allclose(traj[-1][1].data, basis_state(sector, 0).to_density().data, atol=1e-6)

    def test_zero_rate_is_identity(self):
        sector = SpinSector(4)
        rho = uniform_superposition(sector).to_density()
        traj = propagate_lindblad(dissipation_spec(DissipationChannel(0.0), sector), rho, TimeGrid(0, 5, 6))
        for _, r in traj:
            np.testing.assert_array_equal(r.data, rho.data)

    def test_dephasing_destroys_ergotropy_of_superposition(self):
        sector = SpinSector(8)
        h = battery_hamiltonian(sector)
        spec = dephasing_spec(DephasingChannel(2.0), sector)
        traj = propagate_lindblad(spec, uniform_superposition(sector).to_density(), TimeGrid(0, 20, 5))
        assert ergotropy(traj[0][1], h) == pytest.approx(4.0)
        assert ergotropy(traj[-1][1], h) < 1e-3
