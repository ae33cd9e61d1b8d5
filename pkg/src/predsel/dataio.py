"""CSV ingestion and emission, and the real-data fit/predict entry point.

Tabular files are UTF-8 CSV with a header row, '.' decimal, no locale.  The
training file holds the response in the first data column and the regressors
in the remaining columns; a future-rows file holds regressor columns only.
Parse failures are rejected with the offending (row, column) named.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .dgp import TrainingSample
from .lsq import ModelMask, criterion_value, fit_model
from .modelsel import ModelCollection, greedy_block_path, select_min, select_on_path
from .predict import prediction_interval


def read_numeric_csv(path: str) -> tuple:
    """Read a numeric CSV with a header row; returns (header, 2-d array).

    Rejects ragged rows, empty cells, and non-numeric cells, naming the
    1-based data row and column of the first offense.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        width = len(header)
        rows = []
        for i, raw in enumerate(reader, start=1):
            if len(raw) != width:
                raise ValueError(
                    f"{path} row {i}: expected {width} cells, found {len(raw)}"
                )
            parsed = []
            for j, cell in enumerate(raw, start=1):
                text = cell.strip()
                if not text:
                    raise ValueError(
                        f"{path} row {i} column {j} ({header[j - 1]!r}): missing value"
                    )
                try:
                    value = float(text)
                except ValueError:
                    raise ValueError(
                        f"{path} row {i} column {j} ({header[j - 1]!r}): "
                        f"could not parse {text!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise ValueError(
                        f"{path} row {i} column {j} ({header[j - 1]!r}): "
                        f"non-finite value {text!r}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return header, np.asarray(rows, dtype=float)


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def training_sample_to_csv(sample: TrainingSample, path: str) -> None:
    """Round-trippable dump: response first, then the non-intercept columns."""
    p = sample.X.shape[1] - 1
    header = ["y"] + [f"x{j}" for j in range(1, p + 1)]
    rows = np.hstack([sample.Y[:, None], sample.X[:, 1:]])
    write_csv(path, header, rows.tolist())


def sample_from_csv(path: str) -> TrainingSample:
    header, data = read_numeric_csv(path)
    if data.shape[1] < 2:
        raise ValueError(f"{path}: need a response column plus at least one regressor")
    n = data.shape[0]
    X = np.hstack([np.ones((n, 1)), data[:, 1:]])
    return TrainingSample(X, data[:, 0])


def even_blocks(p: int, count: int) -> list:
    """Split regressor columns 1..p into ``count`` consecutive blocks."""
    if not 1 <= count <= p:
        raise ValueError(f"block count must lie in 1..{p}, got {count}")
    edges = np.linspace(1, p + 1, count + 1).astype(int)
    return [list(range(edges[b], edges[b + 1])) for b in range(count)]


@dataclass(frozen=True)
class FitPredictReport:
    selected: ModelMask
    sigma_hat_sq: float
    rho_hat_sq: float
    delta_hat: float
    alpha: float
    rank_deficient: bool
    intervals: tuple  # PredictionInterval per future row

    def to_dict(self) -> dict:
        return {
            "included_regressors": [int(j) for j in np.flatnonzero(self.selected.include[1:]) + 1],
            "m_size": self.selected.size,
            "sigma_hat_sq": self.sigma_hat_sq,
            "rho_hat_sq": self.rho_hat_sq,
            "delta_hat": self.delta_hat,
            "alpha": self.alpha,
            "rank_deficient": self.rank_deficient,
            "intervals": [
                {"row": i + 1, "center": iv.center, "lo": iv.lo, "hi": iv.hi}
                for i, iv in enumerate(self.intervals)
            ],
        }


def fit_and_predict(
    data_path: str,
    blocks: int | None = None,
    masks_path: str | None = None,
    alpha: float = 0.05,
    future_path: str | None = None,
) -> FitPredictReport:
    """Select a model on a data file and emit prediction intervals.

    Model search is either a greedy elimination over ``blocks`` consecutive
    blocks of regressors, or a minimization of the estimated conditional MSE
    over an explicit collection of masks (JSON list of lists of 1-based
    regressor indices).
    """
    sample = sample_from_csv(data_path)
    p = sample.X.shape[1] - 1
    if (blocks is None) == (masks_path is None):
        raise ValueError("exactly one of a block count or a mask collection is required")
    if masks_path is not None:
        with open(masks_path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, list) or not raw:
            raise ValueError(f"{masks_path}: expected a nonempty JSON list of index lists")
        collection = ModelCollection(
            tuple(ModelMask.from_indices(p + 1, idx) for idx in raw)
        )
        selected, _ = select_min(sample, collection, "rho_hat_sq")
    else:
        path = greedy_block_path(sample, even_blocks(p, blocks))
        selected = select_on_path(sample, path)

    fit = fit_model(sample, selected)
    rho_hat_sq = criterion_value(fit, "rho_hat_sq")
    intervals = []
    if future_path is not None:
        header, future = read_numeric_csv(future_path)
        if future.shape[1] != p:
            raise ValueError(
                f"{future_path}: expected {p} regressor columns, found {future.shape[1]}"
            )
        for row in future:
            x_f = np.concatenate([[1.0], row])
            intervals.append(prediction_interval(fit, x_f, alpha))
    return FitPredictReport(
        selected=selected,
        sigma_hat_sq=fit.sigma_hat_sq,
        rho_hat_sq=rho_hat_sq,
        delta_hat=math.sqrt(rho_hat_sq),
        alpha=alpha,
        rank_deficient=fit.rank_deficient,
        intervals=tuple(intervals),
    )
