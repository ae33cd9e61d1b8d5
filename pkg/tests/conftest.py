import numpy as np
import pytest
import scipy.integrate
import scipy.optimize
import scipy.stats
from hypothesis import HealthCheck, settings

import predsel as ps

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def tv_by_quadrature(m1, s1, m2, s2):
    """Numerical-integration oracle for the Gaussian total variation distance.

    The density difference has kinks in |p - q| at its sign changes, which
    wreck fixed-panel adaptive quadrature; locate the crossings numerically
    (grid sign scan plus brentq) and integrate piecewise between them.
    """
    f = lambda x: scipy.stats.norm.pdf(x, m1, s1) - scipy.stats.norm.pdf(x, m2, s2)
    lo = min(m1 - 12 * s1, m2 - 12 * s2)
    hi = max(m1 + 12 * s1, m2 + 12 * s2)
    grid = np.linspace(lo, hi, 4001)
    vals = f(grid)
    crossings = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            crossings.append(float(a))
        elif fa * fb < 0.0:
            crossings.append(float(scipy.optimize.brentq(f, a, b, xtol=1e-14)))
    edges = [lo, *crossings, hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, _ = scipy.integrate.quad(lambda x: abs(f(x)), a, b, epsabs=1e-13, limit=200)
        total += v
    return total / 2.0


@pytest.fixture(scope="session")
def small_dgp() -> ps.Dgp:
    spec = ps.DgpSpec(
        p=4,
        beta0=0.3,
        beta=np.array([1.0, -0.5, 0.25, 0.8]),
        gamma=np.array([0.2, -0.1, 0.4, 0.0]),
        sigma_x=ps.GeometricCov(0.5),
        sigma_u=1.0,
    )
    return ps.build_dgp(spec)


@pytest.fixture()
def sample40(small_dgp) -> ps.TrainingSample:
    return ps.sample_training(small_dgp, 40, 7)
