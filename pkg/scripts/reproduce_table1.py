#!/usr/bin/env python3
"""Reproduce the benchmark delay-probability table for the abandonment-rate
family (theta in {1, 10, 100}, gamma = 0.1, s = 1..1024 doubling).

Writes CSV to stdout or --out; identical to `qedctrl table1`.
"""

import argparse
import sys

from qedctrl.cli import main as cli_main


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", help="write CSV here instead of stdout")
    args = parser.parse_args()
    argv = ["table1"] + (["--out", args.out] if args.out else [])
    sys.exit(cli_main(argv, standalone_mode=False) or 0)
