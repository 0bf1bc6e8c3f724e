#!/usr/bin/env python3
"""Precision comparison of the two schedules over the full benchmark suite.

Runs every function under both the sequential and the phased schedule
(20 independent runs each by default, population 100, dimension 50,
1000 iterations), writes the per-run CSV plus a summary table, and
reports a paired Friedman test per function.

    python scripts/precision_experiment.py --out results/precision.csv
    python scripts/precision_experiment.py --runs 5 --iters 200   # quick look
"""

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sso.benchmarks import FUNCTION_IDS, make_function
from sso.harness import ExperimentConfig, run_experiment, write_summary
from sso.records import ScheduleKind
from sso.stats import friedman


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--nsol", type=int, default=100)
    ap.add_argument("--nvar", type=int, default=50)
    ap.add_argument("--iters", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("precision.csv"))
    args = ap.parse_args()

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # f8 truncates at indivisible dimensions
        functions = [make_function(fid, args.nvar) for fid in FUNCTION_IDS]
        config = ExperimentConfig(
            functions=functions,
            schedules=[ScheduleKind.SEQUENTIAL, ScheduleKind.PARALLEL],
            replications=args.runs, base_seed=args.seed,
            nsol=args.nsol, nvar=args.nvar, niter=args.iters,
            workers=args.workers,
        )
        report = run_experiment(config, out=args.out)

    write_summary(report.summaries, args.out.with_suffix(".summary.csv"))
    print(f"{'fn':<4}{'sched':<12}{'mean':>14}{'std':>12}{'min':>14}")
    for row in report.summaries:
        std = f"{row.std:.4f}" if row.std is not None else "-"
        print(f"{row.function:<4}{str(row.schedule):<12}{row.mean:>14.4f}"
              f"{std:>12}{row.min:>14.4f}")

    print("\npaired Friedman (sequential vs parallel), per function:")
    by_cell = {}
    for rec in report.records:
        by_cell.setdefault((rec.function, rec.schedule), {})[rec.run_id] = rec.best_fitness
    for fid in sorted({fn for fn, _ in by_cell}):
        seq = by_cell[(fid, ScheduleKind.SEQUENTIAL)]
        par = by_cell[(fid, ScheduleKind.PARALLEL)]
        blocks = np.array([[seq[r], par[r]] for r in sorted(seq)])
        result = friedman(blocks)
        print(f"  {fid}: statistic {result.statistic:.4f}  p-value {result.p_value:.4g}")
    print(f"\nrecords -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
