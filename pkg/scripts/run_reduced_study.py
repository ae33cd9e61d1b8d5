#!/usr/bin/env python3
"""Reduced-scale block-search study, both coefficient presets.

Writes per-replication CSVs, aggregate JSON, and a three-panel SVG of the
first replication under predsel-out/simulate-<preset>/.  Takes a couple of
minutes; pass --workers to parallelize replications.
"""
import argparse
import sys

from predsel.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()
    rc = 0
    for preset in ("sparse", "nonsparse"):
        argv = ["simulate", "--preset", preset, "--plot",
                "--out", f"predsel-out/simulate-{preset}"]
        if args.workers is not None:
            argv += ["--workers", str(args.workers)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        rc = max(rc, cli_main(argv))
    return rc


if __name__ == "__main__":
    sys.exit(main())
