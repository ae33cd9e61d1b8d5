#!/usr/bin/env python3
"""Full-scale block-search study: 2000 observations, 50 blocks of 20.

Expect roughly 15 minutes per preset with --workers 4.  Reference medians
for the conditional coverage of the selected model's interval are 0.949
(sparse) and 0.942 (nonsparse); this is a stochastic target, reproduced to
about +-0.01.
"""
import argparse
import sys

from predsel.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--preset", choices=("sparse", "nonsparse", "both"), default="both")
    args = parser.parse_args()
    presets = ("sparse", "nonsparse") if args.preset == "both" else (args.preset,)
    rc = 0
    for preset in presets:
        rc = max(rc, cli_main([
            "simulate", "--preset", preset, "--full-scale", "--plot",
            "--workers", str(args.workers),
            "--out", f"predsel-out/simulate-full-{preset}",
        ]))
    return rc


if __name__ == "__main__":
    sys.exit(main())
