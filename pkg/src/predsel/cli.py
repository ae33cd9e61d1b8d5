"""Command-line entry points.

Verbs: ``simulate`` (block-search study), ``verify-prop21`` (sampling-law
suite), ``verify-bounds`` (inequality grids plus Monte Carlo bound checks),
``fit-predict`` (model selection and intervals on a CSV file).  Exit codes:
0 all checks pass, 1 a statistical check failed, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import config as cfg_mod
from . import dataio
from .study import STUDY_CSV_COLUMNS, plot_replication, run_study, study_csv_rows
from .verify import verify_bounds, verify_prop21


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; defaults are the documented presets")
    sub.add_argument("--seed", type=int, help="override the config seed")
    sub.add_argument("--reps", type=int, help="override the replication count")
    sub.add_argument("--out", help="output directory (default predsel-out/<verb>)")
    sub.add_argument("--workers", type=int,
                     help="worker processes (PREDSEL_WORKERS env var also honored)")


def _load(args, default_ctor) -> cfg_mod.ExperimentConfig:
    cfg = cfg_mod.load_config(args.config) if args.config else default_ctor()
    return cfg_mod.apply_overrides(cfg, seed=args.seed, reps=args.reps, workers=args.workers)


def _outdir(args, verb: str) -> str:
    out = args.out or os.path.join("predsel-out", verb)
    os.makedirs(out, exist_ok=True)
    return out


def _cmd_simulate(args) -> int:
    if args.config and args.full_scale:
        raise ValueError("--full-scale conflicts with --config; set the geometry in the config")
    if args.config:
        cfg = _load(args, cfg_mod.study_config)
    else:
        cfg = cfg_mod.study_config(
            preset=args.preset, scale="full" if args.full_scale else "reduced"
        )
        cfg = cfg_mod.apply_overrides(cfg, seed=args.seed, reps=args.reps, workers=args.workers)
    out = _outdir(args, "simulate")
    result = run_study(cfg)
    dataio.write_csv(os.path.join(out, "replications.csv"), STUDY_CSV_COLUMNS,
                     study_csv_rows(result))
    with open(os.path.join(out, "aggregate.json"), "w", encoding="utf-8") as fh:
        fh.write(result.aggregate_json())
    if args.plot:
        plot_replication(result, 0, os.path.join(out, "replication0.svg"))
    agg = result.aggregate
    print(f"preset={cfg.preset} n={cfg.n} p={cfg.p} "
          f"blocks={cfg.block_count}x{cfg.block_width} reps={cfg.reps}")
    print(f"coverage(selected): median={agg['coverage_selected']['median']:.4f} "
          f"min={agg['coverage_selected']['min']:.4f}")
    print(f"coverage(path min): median={agg['coverage_path_min']['median']:.4f} "
          f"min={agg['coverage_path_min']['min']:.4f}")
    print(f"mean over path of (actual - estimated) MSE: {agg['mean_rho_gap_over_path']:+.5f}")
    print(f"outputs in {out}")
    return 0


def _cmd_verify_prop21(args) -> int:
    cfg = _load(args, cfg_mod.prop21_config)
    out = _outdir(args, "verify-prop21")
    result = verify_prop21(cfg)
    dataio.write_csv(
        os.path.join(out, "checks.csv"),
        ("campaign", "dgp", "check", "statistic", "threshold", "passed"),
        [(r.campaign, r.dgp, r.check, r.statistic, r.threshold, r.passed) for r in result.rows],
    )
    with open(os.path.join(out, "aggregate.json"), "w", encoding="utf-8") as fh:
        fh.write(result.aggregate_json())
    for r in result.rows:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.dgp:9s} {r.check}: "
              f"{r.statistic:.6g} (threshold {r.threshold:.6g})")
    print(f"outputs in {out}")
    return 0 if result.all_passed else 1


def _cmd_verify_bounds(args) -> int:
    cfg = _load(args, cfg_mod.bounds_config)
    out = _outdir(args, "verify-bounds")
    result = verify_bounds(cfg)
    dataio.write_csv(
        os.path.join(out, "grid_checks.csv"),
        ("kind", "evaluated", "skipped", "max_violation"),
        [(g.kind, g.evaluated, g.skipped, g.max_violation) for g in result.grid_reports],
    )
    dataio.write_csv(
        os.path.join(out, "mc_checks.csv"),
        ("dgp", "experiment", "event", "param", "frequency", "bound", "mc_se",
         "passed", "note"),
        [(label, r.experiment, r.event, r.param, r.frequency, r.bound, r.mc_se,
          r.passed, r.note) for label, r in result.mc_rows],
    )
    with open(os.path.join(out, "aggregate.json"), "w", encoding="utf-8") as fh:
        fh.write(result.aggregate_json())
    for g in result.grid_reports:
        ok = g.max_violation <= 1e-9
        print(f"[{'PASS' if ok else 'FAIL'}] grid {g.kind}: max violation {g.max_violation:.3e} "
              f"({g.evaluated} points, {g.skipped} skipped)")
    for label, r in result.mc_rows:
        tag = "SKIP" if r.passed is None else ("PASS" if r.passed else "FAIL")
        shown_bound = min(r.bound, 1.0)  # probabilities: clip for display only
        print(f"[{tag}] {label:9s} {r.experiment:8s} {r.event} "
              f"param={r.param:.4g} freq={r.frequency:.4g} bound={shown_bound:.4g}")
    print(f"outputs in {out}")
    return 0 if result.all_passed else 1


def _cmd_fit_predict(args) -> int:
    out = _outdir(args, "fit-predict")
    report = dataio.fit_and_predict(
        args.data, blocks=args.blocks, masks_path=args.masks,
        alpha=args.alpha, future_path=args.future,
    )
    payload = report.to_dict()
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    if report.intervals:
        dataio.write_csv(
            os.path.join(out, "intervals.csv"),
            ("row", "center", "lo", "hi"),
            [(d["row"], d["center"], d["lo"], d["hi"]) for d in payload["intervals"]],
        )
    print(f"selected {report.selected.size} coefficients "
          f"(regressors {payload['included_regressors']})")
    print(f"sigma_hat_sq={report.sigma_hat_sq:.6g} rho_hat_sq={report.rho_hat_sq:.6g} "
          f"delta_hat={report.delta_hat:.6g}")
    for d in payload["intervals"]:
        print(f"row {d['row']}: {d['center']:.6g} in [{d['lo']:.6g}, {d['hi']:.6g}]")
    print(f"outputs in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="predsel", description=__doc__)
    subs = parser.add_subparsers(dest="verb", required=True)

    sim = subs.add_parser("simulate", help="run the greedy block-search study")
    _add_common(sim)
    sim.add_argument("--preset", choices=("sparse", "nonsparse"), default="sparse")
    sim.add_argument("--full-scale", action="store_true",
                     help="2000 observations, 50 blocks of 20 (expect tens of minutes)")
    sim.add_argument("--plot", action="store_true", help="emit an SVG of replication 0")
    sim.set_defaults(func=_cmd_simulate)

    p21 = subs.add_parser("verify-prop21", help="sampling-distribution suite")
    _add_common(p21)
    p21.set_defaults(func=_cmd_verify_prop21)

    vb = subs.add_parser("verify-bounds", help="inequality grids and MC bound checks")
    _add_common(vb)
    vb.set_defaults(func=_cmd_verify_bounds)

    fp = subs.add_parser("fit-predict", help="select a model on a CSV file and predict")
    fp.add_argument("--data", required=True, help="CSV: response first, regressors after")
    fp.add_argument("--blocks", type=int, help="greedy search over this many consecutive blocks")
    fp.add_argument("--masks", help="JSON list of lists of 1-based regressor indices")
    fp.add_argument("--alpha", type=float, default=0.05)
    fp.add_argument("--future", help="CSV of future regressor rows (no response column)")
    fp.add_argument("--out", help="output directory")
    fp.set_defaults(func=_cmd_fit_predict)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
