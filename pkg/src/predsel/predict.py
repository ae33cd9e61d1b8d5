"""Predictive inference based on a fitted (possibly selected) model.

The estimated error law is the zero-mean Gaussian with variance
``delta_hat_sq = sigma_hat_sq * n / (n + 1 - |m|)``; the feasible interval
is the point prediction plus/minus the 1 - alpha/2 normal quantile times
``delta_hat``.  The infeasible benchmark recenters by the true conditional
bias and uses the true conditional standard deviation, which makes its
conditional coverage exactly nominal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lsq import FitResult, ModelMask, criterion_value, predict_point
from .oracle import GaussianLaw, OracleQuantities
from .special import normal_cdf, normal_quantile


@dataclass(frozen=True)
class PredictionInterval:
    center: float
    halfwidth: float
    alpha: float
    mask: ModelMask

    @property
    def lo(self) -> float:
        return self.center - self.halfwidth

    @property
    def hi(self) -> float:
        return self.center + self.halfwidth

    @property
    def degenerate(self) -> bool:
        """Zero-width interval from an exact fit (RSS = 0)."""
        return self.halfwidth == 0.0

    def contains(self, y: float) -> bool:
        return self.lo <= y <= self.hi


def two_sided_quantile(alpha: float) -> float:
    """1 - alpha/2 quantile of the standard normal."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return normal_quantile(1.0 - 0.5 * alpha)


def estimated_law(fit: FitResult) -> GaussianLaw:
    """Estimated conditional law of the prediction error: N(0, delta_hat_sq)."""
    return GaussianLaw(0.0, math.sqrt(criterion_value(fit, "rho_hat_sq")))


def prediction_interval(fit: FitResult, x_f: np.ndarray, alpha: float) -> PredictionInterval:
    """Feasible interval: point prediction +- q_alpha * delta_hat."""
    q = two_sided_quantile(alpha)
    return PredictionInterval(
        center=predict_point(fit, x_f),
        halfwidth=q * estimated_law(fit).sd,
        alpha=alpha,
        mask=fit.mask,
    )


def infeasible_interval(
    oracle_q: OracleQuantities, fit: FitResult, x_f: np.ndarray, alpha: float
) -> PredictionInterval:
    """Benchmark interval built from the true bias and standard deviation.

    Recentring by nu and widening by q_alpha * delta makes the conditional
    coverage exactly 1 - alpha.
    """
    q = two_sided_quantile(alpha)
    return PredictionInterval(
        center=predict_point(fit, x_f) - oracle_q.nu,
        halfwidth=q * math.sqrt(oracle_q.delta_sq),
        alpha=alpha,
        mask=fit.mask,
    )


@dataclass(frozen=True)
class ThresholdDecision:
    p_value: float  # estimated probability that the future response is on the named side
    reject: bool    # p_value < level: the named side is implausible under the estimated law
    side: str
    threshold: float
    level: float


def threshold_test(
    fit: FitResult, x_f: np.ndarray, c: float, alpha: float, side: str = "above"
) -> ThresholdDecision:
    """One-sided plug-in test of whether the future response lies above or
    below ``c``, under the estimated error law.

    Under N(y_hat, delta_hat_sq) for the future response, the reported
    p-value is P(y > c) for side='above' (mirror for 'below'); ``reject``
    compares it to ``alpha``.  A degenerate law (delta_hat = 0) decides
    deterministically from the sign of y_hat - c.
    """
    if side not in ("above", "below"):
        raise ValueError(f"side must be 'above' or 'below', got {side!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    y_hat = predict_point(fit, x_f)
    sd = estimated_law(fit).sd
    gap = y_hat - c if side == "above" else c - y_hat
    if sd == 0.0:
        p = 1.0 if gap > 0.0 else (0.5 if gap == 0.0 else 0.0)
    else:
        p = normal_cdf(gap / sd)
    return ThresholdDecision(p_value=p, reject=p < alpha, side=side, threshold=c, level=alpha)
