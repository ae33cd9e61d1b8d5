"""Restricted least-squares fits and the RSS-based performance criteria.

A candidate model is an inclusion mask over the p + 1 design columns with
the intercept forced in and fewer than n - 1 included columns.  Fitting uses
column-pivoted QR; on the (measure-zero) rank-deficient event the
minimum-norm solution is returned and flagged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dgp import TrainingSample

PIVOT_RTOL = 1e-10  # rank threshold relative to the largest column norm


@dataclass(frozen=True)
class ModelMask:
    """0-1 inclusion sequence over the p + 1 design columns."""

    include: np.ndarray  # boolean, include[0] is the intercept

    def __post_init__(self):
        arr = np.asarray(self.include, dtype=bool)
        arr.setflags(write=False)
        object.__setattr__(self, "include", arr)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("mask must be a nonempty 1-d boolean sequence")
        if not arr[0]:
            raise ValueError("the intercept column must always be included")

    @property
    def size(self) -> int:
        return int(self.include.sum())

    def check_against(self, n: int) -> None:
        if self.size >= n - 1:
            raise ValueError(f"model size |m|={self.size} must be < n-1 = {n - 1}")

    def key(self) -> tuple:
        """Deterministic tie-break key: smaller |m| first, then lexicographic."""
        return (self.size, tuple(int(b) for b in self.include))

    @staticmethod
    def from_indices(p_plus_1: int, indices) -> "ModelMask":
        inc = np.zeros(p_plus_1, dtype=bool)
        inc[0] = True
        inc[list(indices)] = True
        return ModelMask(inc)

    @staticmethod
    def intercept_only(p_plus_1: int) -> "ModelMask":
        return ModelMask.from_indices(p_plus_1, [])

    @staticmethod
    def full(p_plus_1: int) -> "ModelMask":
        return ModelMask(np.ones(p_plus_1, dtype=bool))


@dataclass(frozen=True)
class FitResult:
    mask: ModelMask
    beta_hat: np.ndarray   # length p + 1, zeros at excluded positions
    rss: float
    n: int
    sigma_hat_sq: float    # rss / (n - |m|)
    rank_deficient: bool = False


def fit_model(sample: TrainingSample, mask: ModelMask) -> FitResult:
    """Least-squares fit of the columns selected by ``mask``.

    Returns the coefficient vector padded with zeros at excluded positions.
    A rank-deficient design (detected from the pivoted-QR diagonal at
    PIVOT_RTOL times the largest column norm) falls back to the
    minimum-norm pseudo-inverse solution and sets ``rank_deficient``.
    """
    n = sample.n
    mask.check_against(n)
    if mask.include.size != sample.X.shape[1]:
        raise ValueError(
            f"mask length {mask.include.size} does not match design width {sample.X.shape[1]}"
        )
    Xm = sample.X[:, mask.include]
    Y = sample.Y
    k = Xm.shape[1]

    Q, R, piv = scipy.linalg.qr(Xm, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = PIVOT_RTOL * max(np.linalg.norm(Xm, axis=0).max(), 1e-300)
    rank = int((diag > tol).sum())
    if rank == k:
        coef_piv = scipy.linalg.solve_triangular(R, Q.T @ Y)
        coef = np.empty(k)
        coef[piv] = coef_piv
        deficient = False
    else:
        coef = np.linalg.pinv(Xm) @ Y
        deficient = True

    resid = Y - Xm @ coef
    rss = float(resid @ resid)
    beta_hat = np.zeros(mask.include.size)
    beta_hat[mask.include] = coef
    return FitResult(
        mask=mask,
        beta_hat=beta_hat,
        rss=rss,
        n=n,
        sigma_hat_sq=rss / (n - mask.size),
        rank_deficient=deficient,
    )


def rss_for_mask(sample: TrainingSample, mask: ModelMask) -> float:
    """RSS-only fast path (no coefficient back-substitution) for scans."""
    mask.check_against(sample.n)
    Xm = sample.X[:, mask.include]
    Q = np.linalg.qr(Xm, mode="reduced")[0]
    resid = sample.Y - Q @ (Q.T @ sample.Y)
    return float(resid @ resid)


CRITERIA = ("sigma_hat_sq", "rho_hat_sq", "rho_check_sq", "gcv", "sp", "delta_check_sq")


def criterion_value(fit: FitResult, kind: str) -> float:
    """Closed-form criteria derived from sigma_hat_sq = RSS / (n - |m|).

    rho_hat_sq  : sigma_hat_sq * n / (n + 1 - |m|)   (also the delta_hat_sq
                  used to width prediction intervals)
    gcv         : sigma_hat_sq * n / (n - |m|)
    sp          : sigma_hat_sq * (n - 2) / (n - 1 - |m|)
    rho_check_sq: sp * (1 + 1/n)                      (unbiased for the
                  expected conditional MSE)
    delta_check_sq coincides with sp.
    """
    n, m = fit.n, fit.mask.size
    s2 = fit.sigma_hat_sq
    if kind == "sigma_hat_sq":
        return s2
    if kind == "rho_hat_sq":
        return s2 * n / (n + 1 - m)
    if kind == "gcv":
        return s2 * n / (n - m)
    if kind == "sp" or kind == "delta_check_sq":
        return s2 * (n - 2) / (n - 1 - m)
    if kind == "rho_check_sq":
        return s2 * (n - 2) / (n - 1 - m) * (1.0 + 1.0 / n)
    raise ValueError(f"unknown criterion {kind!r}; expected one of {CRITERIA}")


def predict_point(fit: FitResult, x_f: np.ndarray) -> float:
    """Linear prediction at a future regressor row (length p + 1, leading 1)."""
    x_f = np.asarray(x_f, dtype=float)
    if x_f.shape != fit.beta_hat.shape:
        raise ValueError(
            f"future row has length {x_f.size}, expected {fit.beta_hat.size}"
        )
    return float(x_f @ fit.beta_hat)
