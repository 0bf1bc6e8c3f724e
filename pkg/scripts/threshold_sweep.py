#!/usr/bin/env python3
"""Sweep the six reference threshold triples and compare with Kruskal-Wallis.

    python scripts/threshold_sweep.py --function f1 --runs 20
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sso.harness import SweepConfig, parameter_sweep, write_records


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--function", default="f1")
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--nsol", type=int, default=100)
    ap.add_argument("--nvar", type=int, default=50)
    ap.add_argument("--iters", type=int, default=1000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    report = parameter_sweep(SweepConfig(
        function=args.function, replications=args.runs, base_seed=args.seed,
        nsol=args.nsol, nvar=args.nvar, niter=args.iters, workers=args.workers,
    ))
    print(f"{'cw':>5}{'cp':>5}{'cg':>5}{'mean':>14}{'std':>12}{'min':>14}")
    for triple, values in report.groups.items():
        arr = np.asarray(values)
        print(f"{triple[0]:>5}{triple[1]:>5}{triple[2]:>5}"
              f"{arr.mean():>14.4f}{arr.std(ddof=1):>12.4f}{arr.min():>14.4f}")
    if report.test is not None:
        print(f"\nkruskal-wallis: statistic {report.test.statistic:.4f}  "
              f"p-value {report.test.p_value:.4g}  df {report.test.df}")
    if args.out is not None:
        write_records(report.records, args.out)
        print(f"records -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
