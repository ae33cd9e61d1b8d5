"""In-repo special functions against an independent implementation (scipy)."""
import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, strategies as st

from predsel.special import (
    normal_cdf,
    normal_pdf,
    normal_quantile,
    reg_inc_beta,
    reg_inc_gamma,
)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.5, 7.5, 22.5, 100.0, 500.0])
def test_reg_inc_gamma_matches_scipy(a):
    xs = np.concatenate([[1e-8, 1e-4], np.geomspace(0.01, 1000.0, 300)])
    errs = [abs(reg_inc_gamma(a, x) - scipy.special.gammainc(a, x)) for x in xs]
    assert max(errs) < 1e-12


@pytest.mark.parametrize("a,b", [(0.5, 23.0), (7.0, 23.0), (0.5, 0.5), (10.0, 993.0), (60.0, 60.0)])
def test_reg_inc_beta_matches_scipy(a, b):
    xs = np.linspace(1e-6, 1.0 - 1e-6, 400)
    errs = [abs(reg_inc_beta(a, b, x) - scipy.special.betainc(a, b, x)) for x in xs]
    assert max(errs) < 1e-12


def test_inc_gamma_edges():
    assert reg_inc_gamma(3.0, 0.0) == 0.0
    assert reg_inc_gamma(3.0, 1e6) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        reg_inc_gamma(0.0, 1.0)


def test_inc_beta_edges():
    assert reg_inc_beta(2.0, 3.0, 0.0) == 0.0
    assert reg_inc_beta(2.0, 3.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        reg_inc_beta(-1.0, 2.0, 0.5)


def test_normal_cdf_matches_scipy():
    xs = np.linspace(-9.0, 9.0, 1001)
    errs = [abs(normal_cdf(x) - scipy.stats.norm.cdf(x)) for x in xs]
    assert max(errs) < 1e-14


def test_normal_quantile_accuracy():
    # documented tolerance is 1e-12; achieved accuracy is near machine eps
    ps = np.concatenate(
        [np.geomspace(1e-15, 0.5, 2000), 1.0 - np.geomspace(1e-15, 0.5, 2000)[::-1]]
    )
    errs = [abs(normal_quantile(p) - scipy.stats.norm.ppf(p)) for p in ps]
    assert max(errs) < 1e-12


def test_normal_quantile_known_value():
    assert normal_quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-12)
    assert normal_quantile(0.5) == 0.0


@pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
def test_normal_quantile_domain(p):
    with pytest.raises(ValueError):
        normal_quantile(p)


@given(st.floats(min_value=1e-10, max_value=1.0 - 1e-10))
def test_normal_quantile_round_trip(p):
    assert normal_cdf(normal_quantile(p)) == pytest.approx(p, abs=1e-12)


def test_normal_pdf_value():
    assert normal_pdf(0.0) == pytest.approx(1.0 / np.sqrt(2 * np.pi), rel=1e-15)
