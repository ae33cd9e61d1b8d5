"""Greedy block-search simulation study with oracle scoring.

Each replication draws a fresh training sample, runs the greedy
general-to-specific block elimination, selects the visited model with the
smallest estimated conditional MSE, and records for every visited model the
estimated and the true conditional MSE plus the true conditional coverage
of the nominal prediction interval built on it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .config import ExperimentConfig, blocks_from_config, build_study_dgp
from .dgp import Dgp, sample_training
from .modelsel import greedy_block_path
from .oracle import conditional_coverage, conditional_regression, oracle_quantities
from .parallel import map_chunks
from .predict import two_sided_quantile
from .rng import substream

STUDY_CSV_COLUMNS = (
    "rep", "model_index", "m_size", "rss", "rho_hat_sq", "rho_sq",
    "nu", "delta_sq", "coverage", "selected",
)


@dataclass(frozen=True)
class ModelRow:
    model_index: int      # 0 = most complex visited model
    m_size: int
    rss: float
    rho_hat_sq: float     # also delta_hat_sq
    rho_sq: float
    nu: float
    delta_sq: float
    coverage: float       # true conditional coverage of the nominal interval


@dataclass(frozen=True)
class ReplicationReport:
    rep: int
    rows: tuple
    selected_index: int
    elimination_order: tuple

    @property
    def selected_row(self) -> ModelRow:
        return self.rows[self.selected_index]

    @property
    def min_coverage(self) -> float:
        return min(r.coverage for r in self.rows)

    @property
    def mean_rho_gap(self) -> float:
        """Mean over the path of (true minus estimated) conditional MSE."""
        return float(np.mean([r.rho_sq - r.rho_hat_sq for r in self.rows]))


@dataclass(frozen=True)
class StudyResult:
    config: ExperimentConfig
    reports: tuple
    aggregate: dict

    def aggregate_json(self) -> str:
        return json.dumps(self.aggregate, indent=2, sort_keys=True)


def _replicate(dgp: Dgp, blocks, n, alpha, seed, start, stop) -> list:
    out = []
    q = two_sided_quantile(alpha)
    for r in range(start, stop):
        sample = sample_training(dgp, n, substream(seed, r))
        path = greedy_block_path(sample, blocks)
        rows = []
        best = None
        for i, (mask, rss) in enumerate(zip(path.visited, path.rss_path)):
            m = mask.size
            rho_hat_sq = rss / (n - m) * n / (n + 1 - m)
            oq = oracle_quantities(conditional_regression(dgp, mask), sample, mask)
            cov = conditional_coverage(oq.law, q * math.sqrt(rho_hat_sq))
            rows.append(
                ModelRow(i, m, float(rss), float(rho_hat_sq), oq.rho_sq, oq.nu,
                         oq.delta_sq, cov)
            )
            cand = ((rho_hat_sq, mask.key()), i)
            if best is None or cand < best:
                best = cand
        out.append(ReplicationReport(r, tuple(rows), best[1], path.elimination_order))
    return out


def run_study(cfg: ExperimentConfig, workers: int | None = None) -> StudyResult:
    """Run the block-search study described by the config."""
    cfg.validate()
    dgp = build_study_dgp(cfg)
    blocks = blocks_from_config(cfg)
    fn = partial(_replicate, dgp, blocks, cfg.n, cfg.alpha, cfg.seed)
    chunks = map_chunks(fn, cfg.reps, workers=workers if workers is not None else cfg.workers,
                        chunk_size=1)
    reports = tuple(rep for chunk in chunks for rep in chunk)
    return StudyResult(cfg, reports, _aggregate(cfg, reports))


def _aggregate(cfg: ExperimentConfig, reports: tuple) -> dict:
    cov_sel = np.array([r.selected_row.coverage for r in reports])
    cov_min = np.array([r.min_coverage for r in reports])
    gaps = np.array([r.mean_rho_gap for r in reports])
    sizes = np.array([r.selected_row.m_size for r in reports])
    return {
        "preset": cfg.preset,
        "n": cfg.n,
        "p": cfg.p,
        "blocks": [cfg.block_count, cfg.block_width],
        "alpha": cfg.alpha,
        "reps": len(reports),
        "seed": cfg.seed,
        "coverage_selected": {
            "median": float(np.median(cov_sel)),
            "min": float(cov_sel.min()),
            "max": float(cov_sel.max()),
        },
        "coverage_path_min": {
            "median": float(np.median(cov_min)),
            "min": float(cov_min.min()),
        },
        "mean_rho_gap_over_path": float(gaps.mean()),
        "rho_hat_sq_selected_median": float(
            np.median([r.selected_row.rho_hat_sq for r in reports])
        ),
        "rho_sq_selected_median": float(
            np.median([r.selected_row.rho_sq for r in reports])
        ),
        "selected_size_median": float(np.median(sizes)),
    }


def study_csv_rows(result: StudyResult):
    """Flat per-model rows in the documented fixed column order."""
    for rep in result.reports:
        for row in rep.rows:
            yield (
                rep.rep, row.model_index, row.m_size, row.rss, row.rho_hat_sq,
                row.rho_sq, row.nu, row.delta_sq, row.coverage,
                int(row.model_index == rep.selected_index),
            )


def plot_replication(result: StudyResult, rep_index: int, path: str) -> None:
    """Static three-panel SVG for one replication: true conditional coverage,
    estimated vs true conditional MSE along the path, and the coefficient
    sequence rearranged by elimination order (first-eliminated rightmost)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cfg = result.config
    report = result.reports[rep_index]
    n_blocks = cfg.block_count
    # x axis: number of blocks included, 0 (intercept only) .. n_blocks (full)
    x = [n_blocks - row.model_index for row in report.rows][::-1]
    rows = report.rows[::-1]
    sel_x = n_blocks - report.selected_index

    fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=False)
    axes[0].plot(x, [r.coverage for r in rows], color="black", lw=1)
    axes[0].axhline(1.0 - cfg.alpha, color="gray", lw=1)
    axes[0].axvline(sel_x, color="black", ls="--", lw=1)
    axes[0].set_ylabel("coverage probability")

    axes[1].plot(x, [r.rho_hat_sq for r in rows], color="black", lw=1, label="estimated")
    axes[1].plot(x, [r.rho_sq for r in rows], color="gray", lw=1, label="actual")
    axes[1].axvline(sel_x, color="black", ls="--", lw=1)
    axes[1].set_ylabel("conditional MSE")
    axes[1].legend(loc="upper right", frameon=False)

    beta = build_study_dgp(cfg).spec.beta
    blocks = blocks_from_config(cfg)
    # left to right: last-eliminated block first
    order = list(report.elimination_order)[::-1]
    rearranged = np.concatenate([beta[np.asarray(blocks[b]) - 1] for b in order])
    axes[2].plot(np.arange(rearranged.size), rearranged, color="black", lw=0.8)
    axes[2].set_ylabel("beta (rearranged)")
    axes[2].set_xlabel("coefficient position / models visited")

    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
