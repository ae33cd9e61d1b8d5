"""Batched replication tables for the Monte Carlo verification campaigns.

Each replication r of a campaign draws a fresh training sample from the
stream (seed, r), refits the candidate model(s), and records the fitted and
the true conditional quantities.  Replications are generated one stream at a
time (so any worker count reproduces the serial run) but the linear algebra
runs batched per chunk.  A slow per-replication reference path through the
public fit/oracle API is used by the tests to pin down the batched kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .dgp import Dgp
from .lsq import ModelMask
from .oracle import ConditionalRegression, GaussianLaw, conditional_regression, exact_tv_gaussian
from .parallel import map_chunks
from .rng import substream


@dataclass(frozen=True)
class FixedMaskTable:
    """Per-replication quantities for one fixed candidate model."""

    n: int
    m_size: int
    sigma_sq_m: float
    sigma_hat_sq: np.ndarray
    rho_hat_sq: np.ndarray   # equals delta_hat_sq
    nu: np.ndarray
    delta_sq: np.ndarray
    rho_sq: np.ndarray
    tv: np.ndarray           # TV(estimated law, true law) per replication


@dataclass(frozen=True)
class CollectionTable:
    """Per-replication, per-candidate-model quantities for a fixed collection."""

    n: int
    m_sizes: np.ndarray        # (K,)
    sigma_sq_m: np.ndarray     # (K,)
    rho_hat_sq: np.ndarray     # (reps, K); equals delta_hat_sq
    nu: np.ndarray             # (reps, K)
    delta_sq: np.ndarray       # (reps, K)
    rho_sq: np.ndarray         # (reps, K)

    @property
    def selected(self) -> np.ndarray:
        """Index of the empirically best model (min rho_hat_sq) per replication."""
        return np.argmin(self.rho_hat_sq, axis=1)

    @property
    def best_rho(self) -> np.ndarray:
        return np.argmin(self.rho_sq, axis=1)

    @property
    def best_delta(self) -> np.ndarray:
        return np.argmin(self.delta_sq, axis=1)


def _draw_batch(dgp: Dgp, n: int, seed: int, start: int, stop: int):
    """Stack per-replication samples; one substream per replication index."""
    B = stop - start
    p = dgp.p
    X = np.empty((B, n, p + 1))
    Y = np.empty((B, n))
    X[:, :, 0] = 1.0
    for i, r in enumerate(range(start, stop)):
        rng = substream(seed, r)
        x = dgp.spec.gamma + rng.standard_normal((n, p)) @ dgp.chol.T
        u = dgp.sigma_u * rng.standard_normal(n)
        X[i, :, 1:] = x
        Y[i] = dgp.spec.beta0 + x @ dgp.spec.beta + u
    return X, Y


def _mask_stats(Zb: np.ndarray, Yb: np.ndarray, cond: ConditionalRegression, n: int, k: int):
    """Batched fit + oracle formulas for one mask on a stacked sample chunk."""
    G = np.einsum("bni,bnj->bij", Zb, Zb)
    zy = np.einsum("bni,bn->bi", Zb, Yb)
    coef = np.linalg.solve(G, zy[..., None])[..., 0]
    resid = Yb - np.einsum("bni,bi->bn", Zb, coef)
    rss = np.einsum("bn,bn->b", resid, resid)
    sigma_hat_sq = rss / (n - k)
    rho_hat_sq = sigma_hat_sq * n / (n + 1 - k)

    Vb = Yb - Zb @ cond.theta
    w = np.linalg.solve(G, np.einsum("bni,bn->bi", Zb, Vb)[..., None])[..., 0]
    nu = w @ cond.eta
    delta_sq = np.einsum("bi,ij,bj->b", w, cond.Gamma, w) + cond.sigma_sq_m
    return sigma_hat_sq, rho_hat_sq, nu, delta_sq


def _fixed_mask_chunk(dgp, mask_include, cond, n, seed, start, stop):
    X, Y = _draw_batch(dgp, n, seed, start, stop)
    Zb = X[:, :, mask_include]
    k = int(mask_include.sum())
    return _mask_stats(Zb, Y, cond, n, k)


def fixed_mask_table(
    dgp: Dgp, mask: ModelMask, n: int, reps: int, seed: int, workers: int | None = None
) -> FixedMaskTable:
    mask.check_against(n)
    cond = conditional_regression(dgp, mask)
    fn = partial(_fixed_mask_chunk, dgp, mask.include, cond, n, seed)
    parts = map_chunks(fn, reps, workers=workers)
    sigma_hat_sq = np.concatenate([p[0] for p in parts])
    rho_hat_sq = np.concatenate([p[1] for p in parts])
    nu = np.concatenate([p[2] for p in parts])
    delta_sq = np.concatenate([p[3] for p in parts])
    tv = np.array(
        [
            exact_tv_gaussian(
                GaussianLaw(0.0, math.sqrt(rh)), GaussianLaw(v, math.sqrt(d))
            )
            for rh, v, d in zip(rho_hat_sq, nu, delta_sq)
        ]
    )
    return FixedMaskTable(
        n=n,
        m_size=mask.size,
        sigma_sq_m=cond.sigma_sq_m,
        sigma_hat_sq=sigma_hat_sq,
        rho_hat_sq=rho_hat_sq,
        nu=nu,
        delta_sq=delta_sq,
        rho_sq=nu * nu + delta_sq,
        tv=tv,
    )


def _collection_chunk(dgp, includes, conds, n, seed, start, stop):
    X, Y = _draw_batch(dgp, n, seed, start, stop)
    B = stop - start
    K = len(includes)
    out = [np.empty((B, K)) for _ in range(3)]
    for j, (inc, cond) in enumerate(zip(includes, conds)):
        Zb = X[:, :, inc]
        _, rho_hat_sq, nu, delta_sq = _mask_stats(Zb, Y, cond, n, int(inc.sum()))
        out[0][:, j] = rho_hat_sq
        out[1][:, j] = nu
        out[2][:, j] = delta_sq
    return out


def collection_table(
    dgp: Dgp,
    masks: "list[ModelMask]",
    n: int,
    reps: int,
    seed: int,
    workers: int | None = None,
) -> CollectionTable:
    for m in masks:
        m.check_against(n)
    conds = [conditional_regression(dgp, m) for m in masks]
    includes = [m.include for m in masks]
    fn = partial(_collection_chunk, dgp, includes, conds, n, seed)
    parts = map_chunks(fn, reps, workers=workers)
    rho_hat_sq = np.concatenate([p[0] for p in parts], axis=0)
    nu = np.concatenate([p[1] for p in parts], axis=0)
    delta_sq = np.concatenate([p[2] for p in parts], axis=0)
    return CollectionTable(
        n=n,
        m_sizes=np.array([m.size for m in masks]),
        sigma_sq_m=np.array([c.sigma_sq_m for c in conds]),
        rho_hat_sq=rho_hat_sq,
        nu=nu,
        delta_sq=delta_sq,
        rho_sq=nu * nu + delta_sq,
    )
