#!/usr/bin/env python3
"""Full verification campaign: sampling-law suite plus every bound check.

Exit code 0 only if every check passes.
"""
import argparse
import sys

from predsel.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    rc = 0
    for verb in ("verify-prop21", "verify-bounds"):
        argv = [verb, "--out", f"predsel-out/{verb}"]
        if args.workers is not None:
            argv += ["--workers", str(args.workers)]
        rc = max(rc, cli_main(argv))
    return rc


if __name__ == "__main__":
    sys.exit(main())
