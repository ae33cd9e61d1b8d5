"""Exact conditional quantities, CDFs, coverage, and total variation."""
import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

import predsel as ps
from predsel.oracle import GaussianLaw
from predsel.rng import substream


class TestConditionalRegression:
    def test_full_mask_conditions_everything_away(self, small_dgp):
        cond = ps.conditional_regression(small_dgp, ps.ModelMask.full(5))
        assert cond.sigma_sq_m == pytest.approx(small_dgp.sigma_u**2, rel=1e-10)
        expect = np.concatenate([[small_dgp.spec.beta0], small_dgp.spec.beta])
        assert np.allclose(cond.theta, expect, rtol=1e-10)

    def test_intercept_only(self, small_dgp):
        cond = ps.conditional_regression(small_dgp, ps.ModelMask.intercept_only(5))
        assert cond.sigma_sq_m == pytest.approx(small_dgp.var_y, rel=1e-15)
        assert cond.theta == pytest.approx([small_dgp.mean_y])

    def test_schur_arithmetic(self):
        # y = beta0 + b*x1 + 0*x2 + u with independent regressors; conditioning
        # on the zero-coefficient regressor removes nothing
        b = 1.5
        spec = ps.DgpSpec(2, 0.0, np.array([b, 0.0]), np.zeros(2), np.eye(2), 1.0)
        dgp = ps.build_dgp(spec)
        cond = ps.conditional_regression(dgp, ps.ModelMask.from_indices(3, [2]))
        assert cond.sigma_sq_m == pytest.approx(b * b + 1.0, rel=1e-12)

    def test_eta_gamma_structure(self, small_dgp):
        cond = ps.conditional_regression(small_dgp, ps.ModelMask.from_indices(5, [2, 4]))
        assert cond.eta[0] == 1.0
        assert np.all(cond.Gamma[0, :] == 0.0) and np.all(cond.Gamma[:, 0] == 0.0)
        assert small_dgp.sigma_u**2 <= cond.sigma_sq_m <= small_dgp.var_y + 1e-12


class TestOracleQuantities:
    def test_tiny_noise_means_no_projection(self):
        spec = ps.DgpSpec(2, 0.5, np.array([1.0, -1.0]), np.zeros(2), np.eye(2), 1e-8)
        dgp = ps.build_dgp(spec)
        s = ps.sample_training(dgp, 50, 3)
        mask = ps.ModelMask.full(3)
        q = ps.oracle_quantities(ps.conditional_regression(dgp, mask), s, mask)
        assert abs(q.nu) < 1e-8
        assert q.delta_sq == pytest.approx(q.sigma_sq_m, rel=1e-6)

    def test_intercept_only_delta_is_sigma(self, small_dgp, sample40):
        mask = ps.ModelMask.intercept_only(5)
        q = ps.oracle_quantities(ps.conditional_regression(small_dgp, mask), sample40, mask)
        assert q.delta_sq == pytest.approx(q.sigma_sq_m, rel=1e-12)

    def test_identity_and_lower_bound(self, small_dgp, sample40):
        for idx in ([1], [2, 3], [1, 2, 3, 4]):
            mask = ps.ModelMask.from_indices(5, idx)
            q = ps.oracle_quantities(ps.conditional_regression(small_dgp, mask), sample40, mask)
            assert q.rho_sq == q.nu**2 + q.delta_sq
            assert q.delta_sq >= q.sigma_sq_m - 1e-12

    def test_matches_mc_oracle(self, small_dgp):
        rng = substream(77)
        for i in range(5):
            n = int(rng.integers(20, 60))
            idx = sorted(rng.choice([1, 2, 3, 4], size=int(rng.integers(1, 4)), replace=False))
            mask = ps.ModelMask.from_indices(5, [int(j) for j in idx])
            s = ps.sample_training(small_dgp, n, (31, i))
            fit = ps.fit_model(s, mask)
            q = ps.oracle_quantities(ps.conditional_regression(small_dgp, mask), s, mask)
            mc = ps.mc_rho_sq(small_dgp, s, mask, fit, 60_000, (32, i))
            assert abs(q.rho_sq - mc.value) < 4 * mc.se

    def test_mc_intercept_only_large_n(self, small_dgp):
        s = ps.sample_training(small_dgp, 20_000, 6)
        mask = ps.ModelMask.intercept_only(5)
        fit = ps.fit_model(s, mask)
        mc = ps.mc_rho_sq(small_dgp, s, mask, fit, 50_000, 61)
        assert abs(mc.value - small_dgp.var_y) < 4 * mc.se + 1e-3 * small_dgp.var_y

    def test_mc_requires_draws(self, small_dgp, sample40):
        mask = ps.ModelMask.intercept_only(5)
        fit = ps.fit_model(sample40, mask)
        with pytest.raises(ValueError, match="1000"):
            ps.mc_rho_sq(small_dgp, sample40, mask, fit, 10, 1)


class TestExpectedRhoSq:
    def test_collapse_at_intercept(self):
        assert ps.expected_rho_sq(1.0, 10, 1) == pytest.approx(1.1, rel=1e-15)

    def test_frozen_values(self):
        assert ps.expected_rho_sq(1.0, 100, 10) == pytest.approx(1.1121348314606743, rel=1e-12)
        assert ps.expected_rho_sq(2.0, 50, 25) == pytest.approx(4.08, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            ps.expected_rho_sq(1.0, 10, 9)


class TestConditionalCoverage:
    def test_exact_nominal(self):
        q = ps.two_sided_quantile(0.05)
        assert ps.conditional_coverage(GaussianLaw(0.0, 2.0), q * 2.0) == pytest.approx(
            0.95, abs=1e-12
        )

    def test_frozen_values(self):
        assert ps.conditional_coverage(GaussianLaw(0.0, 1.0), 1.96 * 1.1) == pytest.approx(
            0.9689163348441969, abs=1e-12
        )
        assert ps.conditional_coverage(GaussianLaw(1.0, 1.0), 1.96) == pytest.approx(
            0.8299341973214241, abs=1e-12
        )

    @given(
        st.floats(min_value=-3, max_value=3),
        st.floats(min_value=0.1, max_value=5),
        st.floats(min_value=0, max_value=10),
    )
    def test_symmetry_and_partition(self, nu, delta, h):
        law = GaussianLaw(nu, delta)
        flipped = GaussianLaw(-nu, delta)
        cov = ps.conditional_coverage(law, h)
        assert cov == pytest.approx(ps.conditional_coverage(flipped, h), abs=1e-12)
        upper = 1.0 - ps.oracle.special.normal_cdf((h - nu) / delta)
        lower = ps.oracle.special.normal_cdf((-h - nu) / delta)
        assert cov + upper + lower == pytest.approx(1.0, abs=1e-12)

    def test_degenerate(self):
        assert ps.conditional_coverage(GaussianLaw(0.5, 0.0), 1.0) == 1.0
        assert ps.conditional_coverage(GaussianLaw(2.0, 0.0), 1.0) == 0.0


class TestExactTv:
    def test_identical_laws(self):
        assert ps.exact_tv_gaussian(GaussianLaw(1.0, 2.0), GaussianLaw(1.0, 2.0)) == 0.0

    def test_shift_closed_form(self):
        tv = ps.exact_tv_gaussian(GaussianLaw(2.0, 1.0), GaussianLaw(0.0, 1.0))
        assert tv == pytest.approx(0.6826894921370859, abs=1e-12)

    def test_scale_closed_form(self):
        tv = ps.exact_tv_gaussian(GaussianLaw(0.0, math.sqrt(math.e)), GaussianLaw(0.0, 1.0))
        assert tv == pytest.approx(0.2370623619028399, abs=1e-12)

    def test_point_masses(self):
        assert ps.exact_tv_gaussian(GaussianLaw(0.0, 0.0), GaussianLaw(0.0, 0.0)) == 0.0
        assert ps.exact_tv_gaussian(GaussianLaw(0.0, 0.0), GaussianLaw(1.0, 0.0)) == 1.0
        assert ps.exact_tv_gaussian(GaussianLaw(0.0, 0.0), GaussianLaw(0.0, 1.0)) == 1.0

    def test_quadrature_oracle(self):
        from conftest import tv_by_quadrature

        rng = substream(55)
        for _ in range(10):
            m1, m2 = rng.normal(0, 2, 2)
            s1, s2 = np.exp(rng.normal(0, 0.7, 2))
            tv = ps.exact_tv_gaussian(GaussianLaw(m1, s1), GaussianLaw(m2, s2))
            assert tv == pytest.approx(tv_by_quadrature(m1, s1, m2, s2), abs=1e-8)

    @given(
        st.floats(min_value=-3, max_value=3), st.floats(min_value=0.2, max_value=4),
        st.floats(min_value=-3, max_value=3), st.floats(min_value=0.2, max_value=4),
        st.floats(min_value=-3, max_value=3), st.floats(min_value=0.2, max_value=4),
    )
    def test_symmetry_triangle_range(self, m1, s1, m2, s2, m3, s3):
        P, Q, R = GaussianLaw(m1, s1), GaussianLaw(m2, s2), GaussianLaw(m3, s3)
        pq = ps.exact_tv_gaussian(P, Q)
        assert 0.0 <= pq <= 1.0
        assert pq == pytest.approx(ps.exact_tv_gaussian(Q, P), abs=1e-10)
        assert pq <= ps.exact_tv_gaussian(P, R) + ps.exact_tv_gaussian(R, Q) + 1e-10


class TestCdfs:
    def test_chi_sq_edges(self):
        assert ps.chi_sq_cdf(0.0, 3) == 0.0
        assert ps.chi_sq_cdf(1e4, 3) == pytest.approx(1.0, abs=1e-14)
        with pytest.raises(ValueError):
            ps.chi_sq_cdf(1.0, 0)

    def test_chi_sq_median(self):
        assert ps.chi_sq_cdf(0.454936423119572, 1) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("k", [1, 2, 5, 45, 200])
    def test_chi_sq_matches_scipy(self, k):
        xs = np.geomspace(1e-3, 1000.0, 250)
        errs = [abs(ps.chi_sq_cdf(x, k) - scipy.stats.chi2.cdf(x, k)) for x in xs]
        assert max(errs) <= 1e-10

    def test_f_symmetry_at_one(self):
        for d in (1, 4, 30, 111):
            assert ps.f_ratio_cdf(1.0, d, d) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("d1,d2", [(1, 1), (14, 46), (3, 100), (60, 7)])
    def test_f_matches_scipy(self, d1, d2):
        xs = np.geomspace(1e-3, 100.0, 200)
        errs = [abs(ps.f_ratio_cdf(x, d1, d2) - scipy.stats.f.cdf(x, d1, d2)) for x in xs]
        assert max(errs) <= 1e-10

    def test_f_domain(self):
        with pytest.raises(ValueError):
            ps.f_ratio_cdf(1.0, 0, 5)


class TestDeltaSqCdf:
    def test_point_mass_for_smallest_model(self):
        assert ps.delta_sq_cdf(0.99, 1.0, 60, 1) == 0.0
        assert ps.delta_sq_cdf(1.0, 1.0, 60, 1) == 1.0

    def test_support_lower_bound(self):
        assert ps.delta_sq_cdf(0.5, 1.0, 60, 15) == 0.0
        assert ps.delta_sq_cdf(1.0, 1.0, 60, 15) == 0.0

    def test_monotone_and_limits(self):
        ts = np.linspace(1.0, 12.0, 100)
        vals = [ps.delta_sq_cdf(t, 1.0, 60, 15) for t in ts]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 0.999

    def test_against_direct_simulation(self):
        # independent route: simulate sigma^2 (1 + chi2_a / chi2_b) directly
        n, m, s2 = 60, 15, 2.0
        rng = substream(2024)
        draws = s2 * (1.0 + rng.chisquare(m - 1, 40_000) / rng.chisquare(n - m + 1, 40_000))
        draws.sort()
        grid = np.arange(1, draws.size + 1) / draws.size
        f = np.array([ps.delta_sq_cdf(t, s2, n, m) for t in draws])
        ks = np.maximum(grid - f, f - (grid - 1.0 / draws.size)).max()
        assert ks < 1.63 / math.sqrt(draws.size)  # ~1% critical value
