#!/usr/bin/env python3
"""Wall-time scaling of the two schedules across population sizes.

Times both engines on the Rosenbrock objective at several population
sizes, prints the speedup table with the power-rectified efficiency,
and writes speedup-curve plot data.

    python scripts/speedup_scaling.py --sizes 100 200 300 350 --out curve.dat
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sso.benchmarks import make_function
from sso.harness import ExperimentConfig, compute_speedup, emit_plot_data, run_experiment
from sso.records import ScheduleKind


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 300, 350])
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--nvar", type=int, default=50)
    ap.add_argument("--iters", type=int, default=200)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--power-a", type=float, default=84.0)
    ap.add_argument("--power-b", type=float, default=180.0)
    ap.add_argument("--out", type=Path, default=Path("speedup_curve.dat"))
    args = ap.parse_args()

    fn = make_function("f4", args.nvar)
    records = []
    print(f"{'nsol':>6}{'seq mean s':>14}{'par mean s':>14}{'speedup':>10}{'RE':>10}")
    for nsol in args.sizes:
        config = ExperimentConfig(
            functions=[fn],
            schedules=[ScheduleKind.SEQUENTIAL, ScheduleKind.PARALLEL],
            replications=args.runs, nsol=nsol, nvar=args.nvar, niter=args.iters,
            workers=args.workers,
        )
        cell = run_experiment(config).records
        records.extend(cell)
        seq = [r.wall_time_s for r in cell if r.schedule is ScheduleKind.SEQUENTIAL]
        par = [r.wall_time_s for r in cell if r.schedule is ScheduleKind.PARALLEL]
        rep = compute_speedup(seq, par, args.power_a, args.power_b, nsol=nsol)
        print(f"{nsol:>6}{rep.mean_time_a:>14.4f}{rep.mean_time_b:>14.4f}"
              f"{rep.speedup:>10.3f}{rep.rectified_efficiency:>10.3f}")

    emit_plot_data(records, "speedup-curve", args.out)
    print(f"\nplot data -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
