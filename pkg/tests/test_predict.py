"""Prediction intervals, the estimated error law, and threshold tests."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import predsel as ps
from predsel.oracle import GaussianLaw, OracleQuantities
from predsel.rng import substream


def _fit(n=100, m=10, sigma_hat_sq=1.0, width=20):
    mask = ps.ModelMask.from_indices(width, range(1, m))
    beta = np.zeros(width)
    beta[0] = 1.0
    return ps.FitResult(mask, beta, sigma_hat_sq * (n - m), n, sigma_hat_sq)


class TestEstimatedLaw:
    def test_intercept_only_sd(self):
        law = ps.estimated_law(_fit(m=1, sigma_hat_sq=4.0))
        assert law.mean == 0.0 and law.sd == pytest.approx(2.0, rel=1e-12)

    def test_frozen_variance(self):
        law = ps.estimated_law(_fit(n=100, m=10, sigma_hat_sq=1.0))
        assert law.sd**2 == pytest.approx(100.0 / 91.0, rel=1e-12)

    def test_degenerate_flagged_by_zero_sd(self):
        law = ps.estimated_law(_fit(sigma_hat_sq=0.0))
        assert law.sd == 0.0


class TestPredictionInterval:
    def test_frozen_halfwidth(self):
        n, m = 100, 10
        s2 = (n + 1.0 - m) / n  # makes delta_hat exactly 1
        fit = _fit(n=n, m=m, sigma_hat_sq=s2)
        x_f = np.zeros(20)
        x_f[0] = 3.0
        iv = ps.prediction_interval(fit, x_f, 0.05)
        assert iv.center == pytest.approx(3.0)
        assert iv.halfwidth == pytest.approx(1.959963984540054, abs=1e-9)

    def test_alpha_near_one_gives_point(self):
        iv = ps.prediction_interval(_fit(), np.zeros(20), 0.999999)
        assert iv.halfwidth < 1e-5

    def test_alpha_domain(self):
        for alpha in (0.0, 1.0, -1.0, 2.0):
            with pytest.raises(ValueError):
                ps.prediction_interval(_fit(), np.zeros(20), alpha)

    def test_nominal_coverage_under_estimated_law(self):
        fit = _fit(sigma_hat_sq=2.7)
        iv = ps.prediction_interval(fit, np.zeros(20), 0.05)
        law = ps.estimated_law(fit)
        assert ps.conditional_coverage(law, iv.halfwidth) == pytest.approx(0.95, abs=1e-12)

    def test_degenerate_interval_flag(self):
        iv = ps.prediction_interval(_fit(sigma_hat_sq=0.0), np.zeros(20), 0.05)
        assert iv.degenerate and iv.lo == iv.hi == iv.center


class TestInfeasibleInterval:
    def test_exact_conditional_coverage(self):
        rng = substream(14)
        for _ in range(10):
            nu = float(rng.normal())
            delta_sq = float(np.exp(rng.normal()))
            q = OracleQuantities(nu, delta_sq, nu * nu + delta_sq, delta_sq)
            iv = ps.infeasible_interval(q, _fit(), np.zeros(20), 0.05)
            # recentring by nu leaves a zero-mean error against the interval
            shifted = GaussianLaw(0.0, math.sqrt(q.delta_sq))
            assert ps.conditional_coverage(shifted, iv.halfwidth) == pytest.approx(
                0.95, abs=1e-12
            )

    def test_coincides_with_feasible_when_truth_matches(self):
        fit = _fit(n=100, m=10, sigma_hat_sq=1.0)
        delta_sq = 100.0 / 91.0
        q = OracleQuantities(0.0, delta_sq, delta_sq, delta_sq)
        x_f = np.zeros(20)
        x_f[0] = 1.0
        a = ps.infeasible_interval(q, fit, x_f, 0.1)
        b = ps.prediction_interval(fit, x_f, 0.1)
        assert a.center == pytest.approx(b.center) and a.halfwidth == pytest.approx(
            b.halfwidth, rel=1e-12
        )

    def test_feasible_coverage_formula(self):
        fit = _fit(n=100, m=10, sigma_hat_sq=1.3)
        q = OracleQuantities(0.4, 1.7, 0.4**2 + 1.7, 1.2)
        x_f = np.zeros(20)
        iv = ps.prediction_interval(fit, x_f, 0.05)
        got = ps.conditional_coverage(GaussianLaw(q.nu, math.sqrt(q.delta_sq)), iv.halfwidth)
        assert 0.0 < got < 0.95  # biased and too-narrow interval undercovers


class TestThresholdTest:
    def test_center_gives_half(self):
        fit = _fit()
        x_f = np.zeros(20)
        x_f[0] = 2.0
        td = ps.threshold_test(fit, x_f, 2.0, 0.05, "above")
        assert td.p_value == pytest.approx(0.5, abs=1e-12) and not td.reject

    def test_quantile_identity(self):
        n, m, alpha = 100, 10, 0.05
        s2 = (n + 1.0 - m) / n
        fit = _fit(n=n, m=m, sigma_hat_sq=s2)  # delta_hat = 1
        q = ps.two_sided_quantile(alpha)
        x_f = np.zeros(20)
        x_f[0] = 5.0
        td = ps.threshold_test(fit, x_f, 5.0 - q, alpha, "above")
        assert td.p_value == pytest.approx(1.0 - alpha / 2.0, abs=1e-9)

    def test_degenerate_decides_by_sign(self):
        fit = _fit(sigma_hat_sq=0.0)
        x_f = np.zeros(20)
        x_f[0] = 1.0
        assert ps.threshold_test(fit, x_f, 0.5, 0.05, "above").p_value == 1.0
        assert ps.threshold_test(fit, x_f, 1.5, 0.05, "above").p_value == 0.0

    def test_sides_are_mirrors(self):
        fit = _fit(sigma_hat_sq=1.7)
        x_f = np.zeros(20)
        x_f[0] = 0.7
        pa = ps.threshold_test(fit, x_f, 0.2, 0.05, "above").p_value
        pb = ps.threshold_test(fit, x_f, 0.2, 0.05, "below").p_value
        assert pa + pb == pytest.approx(1.0, abs=1e-12)

    def test_side_validation(self):
        with pytest.raises(ValueError, match="side"):
            ps.threshold_test(_fit(), np.zeros(20), 0.0, 0.05, "beyond")

    @given(st.floats(min_value=-6, max_value=6), st.floats(min_value=0.02, max_value=0.5))
    def test_interval_iff_one_sided_tests(self, y_f, alpha):
        fit = _fit(sigma_hat_sq=1.21)
        x_f = np.zeros(20)
        x_f[0] = 1.0
        iv = ps.prediction_interval(fit, x_f, alpha)
        above = ps.threshold_test(fit, x_f, y_f, alpha / 2.0, "above")
        below = ps.threshold_test(fit, x_f, y_f, alpha / 2.0, "below")
        assert iv.contains(y_f) == (not above.reject and not below.reject)
