import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlfkpp import analysis, exact


S512 = -math.pi + 2.0 * math.pi * np.arange(512) / 512


class TestCountPeaks:
    def test_constant_profile(self):
        assert analysis.count_peaks(np.ones(64)) == 0

    def test_cosine_mode_count(self):
        assert analysis.count_peaks(1.0 + 0.5 * np.cos(4 * S512)) == 4
        assert analysis.count_peaks(1.0 + 0.5 * np.cos(7 * S512)) == 7

    def test_subthreshold_ripple_ignored(self):
        profile = 1.0 + 0.01 * np.cos(6 * S512)  # 1% < 5% prominence
        assert analysis.count_peaks(profile) == 0
        assert analysis.count_peaks(profile, prominence=0.005) == 6

    def test_peak_straddling_the_seam(self):
        # maximum at s = -pi must still be a single periodic peak
        assert analysis.count_peaks(1.0 + 0.5 * np.cos(S512 - math.pi)) == 1

    def test_short_profile_rejected(self):
        with pytest.raises(ValueError):
            analysis.count_peaks(np.ones(4))

    @given(st.integers(min_value=0, max_value=511),
           st.floats(min_value=0.1, max_value=100.0))
    @settings(max_examples=40, deadline=None)
    def test_rotation_and_scaling_invariance(self, shift, scale):
        profile = 1.0 + 0.5 * np.cos(3 * S512) + 0.2 * np.cos(5 * S512)
        base = analysis.count_peaks(profile)
        assert analysis.count_peaks(scale * np.roll(profile, shift)) == base


class TestHomogeneity:
    def test_constant_is_exactly_zero(self):
        assert analysis.homogeneity(np.full(32, 2.7)) == 0.0

    def test_small_cosine(self):
        for eps in (0.01, 0.05, 0.1):
            h = analysis.homogeneity(1.0 + eps * np.cos(S512))
            assert h == pytest.approx(2.0 * eps, abs=1e-12)


class TestSteadyStateTime:
    def test_exact_homogeneous_detection(self):
        m = exact.HomogeneousModel(1.0, 0.2, 2.926453923110091, 1.0)
        alpha = 0.95
        t = np.arange(0.0, 20.0, 0.01)
        profiles = np.outer(exact.rho0(t, m), np.ones(16))
        # deviation threshold from the alpha criterion: |drho/dt| at T_c
        t_c = exact.t_quasi_steady(alpha, m)
        tol = float(exact.rho0_dt(t_c, m))
        detected = analysis.steady_state_time(t, profiles, tol)
        assert abs(detected - t_c) <= 0.02

    def test_growth_never_steady(self):
        t = np.arange(0.0, 5.0, 0.1)
        profiles = np.outer(np.exp(t), np.ones(8))
        assert analysis.steady_state_time(t, profiles, 1e-6) == \
            analysis.NEVER_STEADY

    def test_constant_input_is_steady_at_start(self):
        t = np.arange(0.0, 1.0, 0.1)
        profiles = np.ones((len(t), 8))
        assert analysis.steady_state_time(t, profiles, 1e-6) == 0.0


class TestRichardsonOrder:
    def test_exact_orders(self):
        assert analysis.richardson_order(4.0, 1.0, 2.0) == pytest.approx(2.0)
        assert analysis.richardson_order(16.0, 1.0, 2.0) == pytest.approx(4.0)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            analysis.richardson_order(0.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            analysis.richardson_order(1.0, 1.0, 1.0)


class TestDiagnostics:
    def test_diagnose_bundle(self):
        profile = 1.0 + 0.5 * np.cos(4 * S512)
        ds = 2.0 * math.pi / 512
        d = analysis.diagnose(profile, ds)
        assert d.n_peaks == 4
        assert d.mass == pytest.approx(2.0 * math.pi, rel=1e-12)
        assert d.linf == pytest.approx(1.5, abs=1e-6)
        assert d.homogeneity == pytest.approx(1.0, abs=1e-6)
