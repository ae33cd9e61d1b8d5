"""Candidate-model collections, criterion minimization, and greedy search.

Ties in every argmin are broken deterministically: smaller model first, then
lexicographic order of the inclusion mask (a valid measurable selection).
The greedy general-to-specific search removes, at each step, the block of
regressors whose elimination increases the RSS the least, producing a nested
path from the full model down to the intercept-only model.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .dgp import Dgp, TrainingSample
from .lsq import ModelMask, criterion_value, fit_model, rss_for_mask
from .oracle import conditional_regression, oracle_quantities


@dataclass(frozen=True)
class ModelCollection:
    masks: tuple

    def __post_init__(self):
        if len(self.masks) < 1:
            raise ValueError("a model collection must contain at least one mask")
        object.__setattr__(self, "masks", tuple(self.masks))

    @property
    def count(self) -> int:
        return len(self.masks)

    @property
    def max_size(self) -> int:
        return max(m.size for m in self.masks)

    def check_against(self, n: int) -> None:
        for m in self.masks:
            m.check_against(n)


@dataclass(frozen=True)
class GreedyPath:
    """Nested models from most complex to intercept-only, with their RSS."""

    visited: tuple            # ModelMask, length = #blocks + 1
    rss_path: np.ndarray      # RSS per visited model, nondecreasing
    elimination_order: tuple  # block indices in removal order


def select_min(
    sample: TrainingSample, collection: ModelCollection, criterion_kind: str = "rho_hat_sq"
) -> tuple[ModelMask, float]:
    """Mask minimizing the criterion over the collection, with the tie rule."""
    collection.check_against(sample.n)
    best = None
    for mask in collection.masks:
        value = criterion_value(fit_model(sample, mask), criterion_kind)
        cand = (value, mask.key())
        if best is None or cand < best[0]:
            best = (cand, mask)
    return best[1], best[0][0]


def oracle_best(
    dgp: Dgp, sample: TrainingSample, collection: ModelCollection, target: str = "rho"
) -> ModelMask:
    """True best mask: minimizer of rho_sq or of delta_sq, same tie rule."""
    if target not in ("rho", "delta"):
        raise ValueError(f"target must be 'rho' or 'delta', got {target!r}")
    collection.check_against(sample.n)
    best = None
    for mask in collection.masks:
        q = oracle_quantities(conditional_regression(dgp, mask), sample, mask)
        value = q.rho_sq if target == "rho" else q.delta_sq
        cand = (value, mask.key())
        if best is None or cand < best[0]:
            best = (cand, mask)
    return best[1]


def _validate_blocks(blocks: Sequence[Sequence[int]], width: int, n: int) -> list:
    cleaned = []
    seen: set[int] = set()
    for b, block in enumerate(blocks):
        cols = [int(c) for c in block]
        if not cols:
            raise ValueError(f"block {b} is empty")
        for c in cols:
            if not 1 <= c < width:
                raise ValueError(f"block {b} column {c} outside the non-intercept range 1..{width - 1}")
            if c in seen:
                raise ValueError(f"column {c} appears in more than one block")
            seen.add(c)
        cleaned.append(cols)
    full_size = 1 + len(seen)
    if full_size >= n - 1:
        raise ValueError(f"full model size {full_size} must be < n-1 = {n - 1}")
    return cleaned


def _mask_for(width: int, active_cols: Sequence[int]) -> ModelMask:
    inc = np.zeros(width, dtype=bool)
    inc[list(active_cols)] = True
    inc[0] = True
    return ModelMask(inc)


def _greedy_downdate(sample: TrainingSample, blocks: list) -> GreedyPath:
    """Single Gram inverse, downdated after each block removal.

    For current coefficients beta = H g with H = (X'X)^{-1}, removing the
    column set J raises the RSS by beta_J' (H_JJ)^{-1} beta_J, so each step
    needs only block-sized solves and a rank-|J| downdate of H.
    """
    X, Y = sample.X, sample.Y
    width = X.shape[1]
    active = [0] + sorted(c for block in blocks for c in block)
    Xa = X[:, active]
    G = Xa.T @ Xa
    g = Xa.T @ Y
    try:
        H = scipy.linalg.cho_solve(scipy.linalg.cho_factor(G), np.eye(G.shape[0]))
    except scipy.linalg.LinAlgError:
        H = np.linalg.pinv(G)
    rss = rss_for_mask(sample, _mask_for(width, active))

    remaining = list(range(len(blocks)))
    visited = [_mask_for(width, active)]
    rss_path = [rss]
    order = []
    while remaining:
        beta = H @ g
        pos = {c: i for i, c in enumerate(active)}
        best = None
        for b in remaining:
            J = [pos[c] for c in blocks[b]]
            bj = beta[J]
            HJJ = H[np.ix_(J, J)]
            try:
                sol = scipy.linalg.cho_solve(scipy.linalg.cho_factor(HJJ), bj)
            except scipy.linalg.LinAlgError:
                sol = np.linalg.pinv(HJJ) @ bj
            increase = float(bj @ sol)
            if best is None or increase < best[0]:
                best = (increase, b)
        increase, b = best
        J = [pos[c] for c in blocks[b]]
        K = [i for i in range(len(active)) if i not in set(J)]
        HKJ = H[np.ix_(K, J)]
        HJJ = H[np.ix_(J, J)]
        try:
            H = H[np.ix_(K, K)] - HKJ @ scipy.linalg.cho_solve(scipy.linalg.cho_factor(HJJ), HKJ.T)
        except scipy.linalg.LinAlgError:
            H = H[np.ix_(K, K)] - HKJ @ np.linalg.pinv(HJJ) @ HKJ.T
        active = [active[i] for i in K]
        g = g[K]
        rss += max(increase, 0.0)
        remaining.remove(b)
        order.append(b)
        visited.append(_mask_for(width, active))
        rss_path.append(rss)
    return GreedyPath(tuple(visited), np.asarray(rss_path), tuple(order))


def _greedy_refit(sample: TrainingSample, blocks: list) -> GreedyPath:
    """Reference route: full refit for every candidate removal at every step."""
    width = sample.X.shape[1]
    active = sorted(c for block in blocks for c in block)
    remaining = list(range(len(blocks)))
    visited = [_mask_for(width, active)]
    rss_path = [rss_for_mask(sample, visited[0])]
    order = []
    while remaining:
        best = None
        for b in remaining:
            drop = set(blocks[b])
            cand_cols = [c for c in active if c not in drop]
            rss = rss_for_mask(sample, _mask_for(width, cand_cols))
            if best is None or rss < best[0]:
                best = (rss, b)
        rss, b = best
        drop = set(blocks[b])
        active = [c for c in active if c not in drop]
        remaining.remove(b)
        order.append(b)
        visited.append(_mask_for(width, active))
        rss_path.append(rss)
    return GreedyPath(tuple(visited), np.asarray(rss_path), tuple(order))


def greedy_block_path(
    sample: TrainingSample, blocks: Sequence[Sequence[int]], method: str = "downdate"
) -> GreedyPath:
    """Greedy general-to-specific elimination over a block partition.

    ``blocks`` lists disjoint groups of non-intercept column indices; the
    path starts at the model containing the intercept plus every block and
    ends at the intercept-only model.  Ties go to the lowest block index.
    ``method`` selects the Gram-downdating fast path (default) or the
    exhaustive per-step refit route; both return identical block choices up
    to floating-point ties.
    """
    cleaned = _validate_blocks(blocks, sample.X.shape[1], sample.n)
    if method == "downdate":
        return _greedy_downdate(sample, cleaned)
    if method == "refit":
        return _greedy_refit(sample, cleaned)
    raise ValueError(f"unknown method {method!r}; expected 'downdate' or 'refit'")


def select_on_path(sample: TrainingSample, path: GreedyPath) -> ModelMask:
    """Minimizer of rho_hat_sq among the models visited by the greedy search."""
    if len(path.visited) == 0:
        raise ValueError("empty greedy path")
    n = sample.n
    best = None
    for mask, rss in zip(path.visited, path.rss_path):
        m = mask.size
        value = rss / (n - m) * n / (n + 1 - m)
        cand = (value, mask.key())
        if best is None or cand < best[0]:
            best = (cand, mask)
    return best[1]
