import math

import numpy as np
import pytest

from nlfkpp import exact, spectral
from nlfkpp.kernel import SQRT_TWO_PI, CircleKernelParams, eigenvalue

LAMBDA0 = 2.926453923110091


def bump(s):
    return 1.0 / SQRT_TWO_PI + 0.1 * np.exp(-np.asarray(s) ** 2 / 0.6)


class TestProjection:
    def test_homogeneous_projects_to_zero_mode(self, unit_kernel):
        state = spectral.project_initial(lambda s: np.full_like(s, 2.0 / SQRT_TWO_PI), 4)
        assert state.mode(0) == pytest.approx(2.0, abs=1e-12)
        for j in (1, 2, 3, 4):
            assert abs(state.mode(j)) < 1e-12

    def test_cosine_mode(self):
        state = spectral.project_initial(lambda s: np.cos(3 * s), 5)
        # cos(3s) = (e^{3is} + e^{-3is})/2 = sqrt(2 pi)/2 (v_3 + v_-3)
        assert state.mode(3) == pytest.approx(SQRT_TWO_PI / 2, abs=1e-12)
        assert state.mode(-3) == pytest.approx(SQRT_TWO_PI / 2, abs=1e-12)
        assert abs(state.mode(0)) < 1e-12

    def test_conjugate_pairing(self):
        state = spectral.project_initial(bump, 8)
        np.testing.assert_allclose(state.beta, state.beta[::-1].conj(), rtol=0)

    def test_quadrature_floor(self):
        with pytest.raises(ValueError):
            spectral.project_initial(bump, 4, n_quad=512)

    def test_roundtrip_through_reconstruct(self):
        state = spectral.project_initial(bump, 24)
        s = np.linspace(-math.pi, math.pi, 129)
        np.testing.assert_allclose(spectral.reconstruct(state, s), bump(s),
                                   atol=1e-10)


class TestRhs:
    def test_matches_bruteforce(self, unit_kernel):
        rng = np.random.default_rng(3)
        for J in (1, 4, 9):
            half = rng.random(J) + 1j * rng.random(J)
            beta = np.concatenate([half[::-1].conj(), [rng.random(1)[0] + 0j], half])
            state = spectral.SpectralState(J, beta)
            rates = spectral.DiffusiveRates(1.0, 0.1)
            np.testing.assert_allclose(
                spectral.rhs(state, rates, unit_kernel, 0.2),
                spectral.rhs_bruteforce(state, rates, unit_kernel, 0.2),
                rtol=1e-12, atol=1e-14)

    def test_zero_mode_only_is_logistic(self, unit_kernel):
        state = spectral.SpectralState(3, np.array([0, 0, 0, 2.0, 0, 0, 0], complex))
        deriv = spectral.rhs(state, spectral.DiffusiveRates(1.0), unit_kernel, 0.2)
        expected = 1.0 * 2.0 - 0.2 / SQRT_TWO_PI * LAMBDA0 * 4.0
        assert deriv[3] == pytest.approx(expected, rel=1e-12)
        assert np.max(np.abs(np.delete(deriv, 3))) == 0.0

    def test_diffusive_rates_band(self):
        rates = spectral.DiffusiveRates(1.0, 0.5)
        np.testing.assert_allclose(rates.band(2),
                                   [1.0 - 2.0, 0.5, 1.0, 0.5, -1.0])

    def test_negative_diffusion_rejected(self):
        with pytest.raises(ValueError):
            spectral.DiffusiveRates(1.0, -0.1)


class TestIntegrate:
    def test_symmetric_data_follows_exact_beta0(self, unit_kernel):
        # beta_{0j} = delta_{j0}: the zero mode is closed and logistic
        state0 = spectral.SpectralState(5, np.eye(11)[5].astype(complex))
        traj = spectral.integrate(state0, spectral.DiffusiveRates(1.0),
                                  unit_kernel, 0.2, 20.0, 0.01)
        m = exact.HomogeneousModel(1.0, 0.2, LAMBDA0, 1.0)
        for t in (1.0, 5.0, 20.0):
            assert abs(traj.at_time(t).mode(0) - exact.beta0(t, m)) < 1e-8

    def test_kappa_zero_modes_grow_independently(self, unit_kernel):
        state0 = spectral.project_initial(bump, 4)
        rates = spectral.DiffusiveRates(1.0, 0.3)
        traj = spectral.integrate(state0, rates, unit_kernel, 0.0, 2.0, 0.005)
        final = traj.at_time(2.0)
        for j in range(-4, 5):
            expected = state0.mode(j) * np.exp(rates.rate(j) * 2.0)
            assert abs(final.mode(j) - expected) < 1e-9

    def test_reality_preserved(self, unit_kernel):
        state0 = spectral.project_initial(bump, 6)
        traj = spectral.integrate(state0, spectral.DiffusiveRates(1.0, 0.1),
                                  unit_kernel, 0.2, 10.0, 0.01)
        assert traj.reality_drift < 1e-12
        beta_T = traj.beta[-1]
        np.testing.assert_allclose(beta_T, beta_T[::-1].conj(), rtol=0)

    def test_blowup_detected(self, unit_kernel):
        # kappa < 0 makes the quadratic term antidissipative
        state0 = spectral.SpectralState(2, np.array([0, 0, 5.0, 0, 0], complex))
        with pytest.raises(RuntimeError):
            spectral.integrate(state0, spectral.DiffusiveRates(5.0),
                               unit_kernel, -2.0, 50.0, 0.05)

    def test_trajectory_csv_roundtrip(self, unit_kernel, tmp_path):
        from nlfkpp.csvio import read_csv
        state0 = spectral.project_initial(bump, 3)
        traj = spectral.integrate(state0, spectral.DiffusiveRates(1.0),
                                  unit_kernel, 0.2, 1.0, 0.1)
        path = tmp_path / "traj.csv"
        traj.to_csv(path)
        header, cols = read_csv(path)
        assert header == ["t", "j", "re_beta", "im_beta"]
        n_modes = 2 * traj.J + 1
        assert len(cols[0]) == len(traj.t) * n_modes
        np.testing.assert_allclose(cols[2][:n_modes], traj.beta[0].real, rtol=0)


class TestOmegaCoefficients:
    def test_fourier_product_selection_rule(self):
        # v_j*(s) v_j'(s) = (2 pi)^{-1/2} v_{j-j'}*(s) picks one coefficient
        basis = lambda k: (lambda s: np.exp(1j * k * s) / SQRT_TWO_PI)
        coeffs = spectral.omega_coefficients(2, 5, basis, range(-6, 7))
        for k, c in coeffs.items():
            expected = 1.0 / SQRT_TWO_PI if k == -3 else 0.0
            assert abs(c - expected) < 1e-12

    def test_rejects_non_orthonormal_family(self):
        basis = lambda k: (lambda s: np.ones_like(s))
        with pytest.raises(ValueError):
            spectral.omega_coefficients(0, 1, basis, [0, 1])


class TestExponentialForm:
    def test_matches_reconstruction(self, unit_kernel):
        # the exponential representation resums to the same density
        state0 = spectral.project_initial(bump, 12)
        traj = spectral.integrate(state0, spectral.DiffusiveRates(1.0),
                                  unit_kernel, 0.2, 5.0, 0.001, store_every=1)
        s = np.linspace(-math.pi, math.pi, 65)
        via_exp = spectral.exponential_form(traj, unit_kernel, bump, s, 1.0, 0.2)
        direct = spectral.reconstruct(traj.at_time(5.0), s)
        np.testing.assert_allclose(via_exp, direct, rtol=2e-3)
