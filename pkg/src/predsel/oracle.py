"""True conditional quantities for a known process and a fixed training sample.

Everything here is exact given the process parameters: the conditional
regression of the response on the included regressors, the conditional bias
``nu`` and variance ``delta_sq`` of the prediction error, the conditional
MSE ``rho_sq = nu^2 + delta_sq``, exact interval coverage under the error
law, the exact total variation distance between two univariate Gaussians,
and the sampling distributions of the error-law ingredients (chi-square /
variance-ratio CDFs).  A brute-force fresh-draw Monte Carlo estimate of the
conditional MSE is provided as an independent cross-check of the formulas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import special
from .dgp import Dgp, TrainingSample, sample_future
from .lsq import FitResult, ModelMask


@dataclass(frozen=True)
class GaussianLaw:
    """Univariate normal N(mean, sd^2); sd = 0 is a point mass."""

    mean: float
    sd: float

    def __post_init__(self):
        if self.sd < 0.0:
            raise ValueError(f"standard deviation must be >= 0, got {self.sd}")


@dataclass(frozen=True)
class ConditionalRegression:
    """Regression of y on the included regressors z: y = z' theta + v."""

    theta: np.ndarray       # |m| coefficients, intercept first
    eta: np.ndarray         # E[z], first entry 1
    Gamma: np.ndarray       # Cov(z), first row/col zero
    sigma_sq_m: float       # Var(y | included regressors) = Var(v)


@dataclass(frozen=True)
class OracleQuantities:
    nu: float               # conditional bias of the predictor
    delta_sq: float         # conditional variance of the prediction error
    rho_sq: float           # nu^2 + delta_sq
    sigma_sq_m: float
    rank_deficient: bool = False

    @property
    def law(self) -> GaussianLaw:
        """Conditional law of the prediction error given the training sample."""
        return GaussianLaw(self.nu, math.sqrt(self.delta_sq))


def conditional_regression(dgp: Dgp, mask: ModelMask) -> ConditionalRegression:
    """Exact conditional moments for the regressors included in ``mask``."""
    idx = np.flatnonzero(mask.include[1:])  # non-intercept positions, 0-based
    k = idx.size
    if k == 0:
        return ConditionalRegression(
            theta=np.array([dgp.mean_y]),
            eta=np.array([1.0]),
            Gamma=np.zeros((1, 1)),
            sigma_sq_m=dgp.var_y,
        )
    S = dgp.sigma[np.ix_(idx, idx)]
    c = dgp.cov_xy[idx]
    try:
        cho = scipy.linalg.cho_factor(S)
    except scipy.linalg.LinAlgError as exc:
        raise ValueError("included-regressor covariance is numerically singular") from exc
    slope = scipy.linalg.cho_solve(cho, c)
    sigma_sq_m = float(dgp.var_y - c @ slope)
    gamma_m = dgp.spec.gamma[idx]
    theta = np.concatenate([[dgp.mean_y - gamma_m @ slope], slope])
    eta = np.concatenate([[1.0], gamma_m])
    Gamma = np.zeros((k + 1, k + 1))
    Gamma[1:, 1:] = S
    return ConditionalRegression(theta, eta, Gamma, sigma_sq_m)


def oracle_quantities(
    cond: ConditionalRegression, sample: TrainingSample, mask: ModelMask
) -> OracleQuantities:
    """Conditional bias and variance of the prediction error, exactly.

    With Z the included training columns and V = Y - Z theta:
    nu = eta' (Z'Z)^{-1} Z'V and delta_sq = w' Gamma w + sigma_sq_m for
    w = (Z'Z)^{-1} Z'V.
    """
    Z = sample.X[:, mask.include]
    V = sample.Y - Z @ cond.theta
    G = Z.T @ Z
    zv = Z.T @ V
    deficient = False
    try:
        w = scipy.linalg.cho_solve(scipy.linalg.cho_factor(G), zv)
    except scipy.linalg.LinAlgError:
        w = np.linalg.pinv(Z) @ V
        deficient = True
    nu = float(cond.eta @ w)
    delta_sq = float(w @ cond.Gamma @ w + cond.sigma_sq_m)
    return OracleQuantities(
        nu=nu,
        delta_sq=delta_sq,
        rho_sq=nu * nu + delta_sq,
        sigma_sq_m=cond.sigma_sq_m,
        rank_deficient=deficient,
    )


@dataclass(frozen=True)
class McEstimate:
    value: float
    se: float


def mc_rho_sq(
    dgp: Dgp, sample: TrainingSample, mask: ModelMask, fit: FitResult, draws: int, seed
) -> McEstimate:
    """Brute-force conditional MSE: fresh future draws against a fixed fit."""
    if draws < 1000:
        raise ValueError(f"need at least 1000 draws for a usable estimate, got {draws}")
    fut = sample_future(dgp, draws, seed)
    errors = fut.x @ fit.beta_hat - fut.y
    sq = errors * errors
    return McEstimate(float(sq.mean()), float(sq.std(ddof=1) / math.sqrt(draws)))


def expected_rho_sq(sigma_sq_m: float, n: int, m_size: int) -> float:
    """Unconditional mean of the conditional MSE for a fixed model."""
    if n - 1 - m_size <= 0:
        raise ValueError(f"need n - 1 - |m| > 0, got n={n}, |m|={m_size}")
    return sigma_sq_m * (n - 2) / (n - 1 - m_size) * (1.0 + 1.0 / n)


def conditional_coverage(truth: GaussianLaw, halfwidth: float) -> float:
    """P(|e| <= halfwidth) for e ~ N(nu, delta^2)."""
    if halfwidth < 0.0:
        raise ValueError(f"halfwidth must be >= 0, got {halfwidth}")
    nu, delta = truth.mean, truth.sd
    if delta == 0.0:
        return 1.0 if abs(nu) <= halfwidth else 0.0
    return special.normal_cdf((halfwidth - nu) / delta) - special.normal_cdf(
        (-halfwidth - nu) / delta
    )


def exact_tv_gaussian(P: GaussianLaw, Q: GaussianLaw) -> float:
    """Exact total variation distance between two univariate Gaussians.

    Computed from the sign set of the log-likelihood ratio, a quadratic with
    at most two real roots; near-equal variances fall back to the
    equal-variance closed form 2 Phi(|mean gap| / (2 sd)) - 1 to avoid
    cancellation in the quadratic coefficients.
    """
    if P.sd == 0.0 or Q.sd == 0.0:
        if P.sd == Q.sd and P.mean == Q.mean:
            return 0.0
        return 1.0
    # Standardize to TV(N(a, s^2), N(0, 1)).
    a = (P.mean - Q.mean) / Q.sd
    s = P.sd / Q.sd
    log_s_sq = 2.0 * math.log(s)
    if abs(log_s_sq) < 1e-12:
        return 2.0 * special.normal_cdf(abs(a) / (2.0 * s)) - 1.0
    # log p/q at t is A t^2 + B t + C.
    A = 0.5 * (1.0 - 1.0 / (s * s))
    B = a / (s * s)
    C = -a * a / (2.0 * s * s) - math.log(s)
    disc = B * B - 4.0 * A * C
    if disc <= 0.0:
        return 0.0
    sq = math.sqrt(disc)
    qq = -0.5 * (B + math.copysign(sq, B if B != 0.0 else 1.0))
    r1, r2 = qq / A, C / qq
    lo, hi = min(r1, r2), max(r1, r2)

    def prob_between(mean, sd):
        return special.normal_cdf((hi - mean) / sd) - special.normal_cdf((lo - mean) / sd)

    if A > 0.0:  # wider P: p > q outside the roots
        tv = (1.0 - prob_between(a, s)) - (1.0 - prob_between(0.0, 1.0))
    else:        # narrower P: p > q between the roots
        tv = prob_between(a, s) - prob_between(0.0, 1.0)
    return min(max(tv, 0.0), 1.0)


def chi_sq_cdf(x: float, k: int) -> float:
    """CDF of the chi-square distribution with k >= 1 degrees of freedom."""
    if k < 1 or int(k) != k:
        raise ValueError(f"degrees of freedom must be a positive integer, got {k}")
    if x <= 0.0:
        return 0.0
    return special.reg_inc_gamma(0.5 * k, 0.5 * x)


def f_ratio_cdf(x: float, d1: int, d2: int) -> float:
    """CDF of the F distribution with (d1, d2) degrees of freedom."""
    if d1 < 1 or d2 < 1 or int(d1) != d1 or int(d2) != d2:
        raise ValueError(f"degrees of freedom must be positive integers, got ({d1}, {d2})")
    if x <= 0.0:
        return 0.0
    return special.reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2))


def delta_sq_cdf(t: float, sigma_sq_m: float, n: int, m_size: int) -> float:
    """CDF of the conditional prediction-error variance for a fixed model.

    delta_sq is distributed as sigma_sq_m * (1 + A/B) with independent
    A ~ chi-square(|m| - 1) and B ~ chi-square(n - |m| + 1); for |m| = 1 the
    law is a point mass at sigma_sq_m.
    """
    if n - m_size + 1 < 1:
        raise ValueError(f"need n - |m| + 1 >= 1, got n={n}, |m|={m_size}")
    if sigma_sq_m <= 0.0:
        raise ValueError(f"sigma_sq_m must be > 0, got {sigma_sq_m}")
    if m_size == 1:
        return 1.0 if t >= sigma_sq_m else 0.0
    if t <= sigma_sq_m:
        return 0.0
    a, b = m_size - 1, n - m_size + 1
    # A/B = (a/b) F(a, b), so P(1 + A/B <= t/sigma^2) maps to the F CDF.
    return f_ratio_cdf((t / sigma_sq_m - 1.0) * b / a, a, b)
