"""Command-line interface.

Subcommands: ``run`` (repeated optimization runs to CSV), ``sweep``
(threshold combinations compared with Kruskal-Wallis), ``compare``
(speedup/rectified-efficiency plus a paired Friedman precision test of
two results files), ``stats`` (hypothesis tests over CSV columns), and
``plot-data`` (plot-ready columnar files).

Every subcommand accepts ``--config FILE`` (JSON, same keys as the
long flags); explicit flags override file values.  Exit codes: 0 ok,
1 usage error, 2 runtime failure, 3 degenerate statistics under
``--strict``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, stats
from .parallel import LayoutMode
from .records import ScheduleKind

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_DEGENERATE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract wants 1
    def error(self, message):
        raise UsageError(message)


def _add_common(p: _Parser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file with the same keys as the long flags; flags win")
    p.add_argument("--strict", action="store_true", default=None,
                   help="treat degenerate statistics as an error (exit 3)")


def _merged(args: argparse.Namespace, defaults: dict) -> dict:
    """Layer: hard defaults < config file < explicit CLI flags."""
    merged = dict(defaults)
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise UsageError(f"config file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}")
        for key, value in loaded.items():
            if key not in defaults:
                raise UsageError(f"unknown config key {key!r}")
            merged[key] = value
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _build_parser() -> _Parser:
    parser = _Parser(prog="sso", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="repeated optimization runs, results to CSV")
    run.add_argument("--function", choices=list("f" + str(i) for i in range(1, 10)))
    run.add_argument("--schedule", choices=["sequential", "parallel"])
    run.add_argument("--workers", type=int)
    run.add_argument("--nsol", type=int)
    run.add_argument("--nvar", type=int)
    run.add_argument("--iters", type=int)
    run.add_argument("--cw", type=float)
    run.add_argument("--cp", type=float)
    run.add_argument("--cg", type=float)
    run.add_argument("--seed", type=int, help="base seed; run r uses seed + r")
    run.add_argument("--runs", type=int)
    run.add_argument("--layout", choices=[str(m) for m in LayoutMode])
    run.add_argument("--out", type=Path)
    run.add_argument("--trajectory", action="store_true", default=None,
                     help="also write <out>.trajectories.dat")
    _add_common(run)

    sweep = sub.add_parser("sweep", help="compare threshold triples with Kruskal-Wallis")
    sweep.add_argument("--function", choices=list("f" + str(i) for i in range(1, 10)))
    sweep.add_argument("--triples",
                       help="'builtin' for the six reference combinations, or a file "
                            "with one 'cw,cp,cg' line per combination")
    sweep.add_argument("--runs", type=int)
    sweep.add_argument("--nsol", type=int)
    sweep.add_argument("--nvar", type=int)
    sweep.add_argument("--iters", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--out", type=Path)
    _add_common(sweep)

    compare = sub.add_parser("compare", help="speedup metrics and paired precision test")
    compare.add_argument("csv_a", type=Path)
    compare.add_argument("csv_b", type=Path)
    compare.add_argument("--power-a", dest="power_a", type=float)
    compare.add_argument("--power-b", dest="power_b", type=float)
    _add_common(compare)

    statsp = sub.add_parser("stats", help="hypothesis tests over a results CSV")
    statsp.add_argument("--input", type=Path, required=True)
    statsp.add_argument("--test", required=True,
                        choices=["kruskal", "friedman", "bartlett", "levene",
                                 "ttest", "normality"])
    statsp.add_argument("--group-by", dest="group_by",
                        help="column (or comma-joined columns) forming the groups")
    statsp.add_argument("--value", help="value column, default best_fitness")
    statsp.add_argument("--block-by", dest="block_by",
                        help="friedman block column, default run_id")
    _add_common(statsp)

    plot = sub.add_parser("plot-data", help="emit plot-ready columnar data")
    plot.add_argument("--input", type=Path, required=True)
    plot.add_argument("--kind", required=True, choices=list(harness.PLOT_KINDS))
    plot.add_argument("--out", type=Path, required=True)
    _add_common(plot)

    return parser


def _cmd_run(args) -> int:
    cfg = _merged(args, {
        "function": "f1", "schedule": "parallel", "workers": 1,
        "nsol": harness.DEFAULT_NSOL, "nvar": harness.DEFAULT_NVAR,
        "iters": harness.DEFAULT_NITER,
        "cw": harness.DEFAULT_THRESHOLDS[0], "cp": harness.DEFAULT_THRESHOLDS[1],
        "cg": harness.DEFAULT_THRESHOLDS[2],
        "seed": 0, "runs": harness.DEFAULT_REPLICATIONS,
        "layout": str(LayoutMode.PARTICLE_MAJOR), "out": None,
        "trajectory": False, "strict": False,
    })
    try:
        config = harness.ExperimentConfig(
            functions=[cfg["function"]],
            schedules=[ScheduleKind(cfg["schedule"])],
            replications=int(cfg["runs"]),
            base_seed=int(cfg["seed"]),
            nsol=int(cfg["nsol"]), nvar=int(cfg["nvar"]), niter=int(cfg["iters"]),
            cw=float(cfg["cw"]), cp=float(cfg["cp"]), cg=float(cfg["cg"]),
            workers=int(cfg["workers"]),
            layout=LayoutMode(cfg["layout"]),
            record_trajectory=bool(cfg["trajectory"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    report = harness.run_experiment(config, out=cfg["out"])
    if cfg["out"] is not None and cfg["trajectory"]:
        side = Path(cfg["out"]).with_suffix(Path(cfg["out"]).suffix + ".trajectories.dat")
        harness.write_trajectories(report.records, side)
        print(f"trajectories -> {side}")
    _print_summaries(report.summaries)
    if cfg["out"] is not None:
        print(f"records -> {cfg['out']}")
    return EXIT_OK


def _print_summaries(summaries) -> None:
    print(f"{'function':<10}{'schedule':<12}{'n':>4}{'mean':>16}{'std':>16}{'min':>16}")
    for row in summaries:
        std = f"{row.std:.6g}" if row.std is not None else "-"
        print(f"{row.function:<10}{str(row.schedule):<12}{row.n:>4}"
              f"{row.mean:>16.6g}{std:>16}{row.min:>16.6g}")


def _parse_triples(token: str) -> tuple:
    if token in (None, "builtin"):
        return harness.DEFAULT_TRIPLES
    path = Path(token)
    if not path.exists():
        raise UsageError(f"--triples expects 'builtin' or an existing file, got {token!r}")
    triples = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [float(v) for v in line.replace(",", " ").split()]
        if len(parts) != 3:
            raise UsageError(f"triple line must have 3 values, got {line!r}")
        triples.append(tuple(parts))
    if not triples:
        raise UsageError(f"no triples found in {path}")
    return tuple(triples)


def _cmd_sweep(args) -> int:
    cfg = _merged(args, {
        "function": "f1", "triples": "builtin", "runs": harness.DEFAULT_REPLICATIONS,
        "nsol": harness.DEFAULT_NSOL, "nvar": harness.DEFAULT_NVAR,
        "iters": harness.DEFAULT_NITER, "workers": 1, "seed": 0,
        "out": None, "strict": False,
    })
    try:
        config = harness.SweepConfig(
            function=cfg["function"],
            triples=_parse_triples(cfg["triples"]),
            replications=int(cfg["runs"]),
            base_seed=int(cfg["seed"]),
            nsol=int(cfg["nsol"]), nvar=int(cfg["nvar"]), niter=int(cfg["iters"]),
            workers=int(cfg["workers"]),
        )
        report = harness.parameter_sweep(config)
    except ValueError as exc:
        raise UsageError(str(exc))
    if cfg["out"] is not None:
        harness.write_records(report.records, cfg["out"])
        print(f"records -> {cfg['out']}")
    print(f"{'cw':>6}{'cp':>6}{'cg':>6}{'n':>4}{'mean':>16}{'std':>16}{'min':>16}")
    for triple, values in report.groups.items():
        arr = np.asarray(values)
        std = f"{arr.std(ddof=1):.6g}" if arr.size > 1 else "-"
        print(f"{triple[0]:>6}{triple[1]:>6}{triple[2]:>6}{arr.size:>4}"
              f"{arr.mean():>16.6g}{std:>16}{arr.min():>16.6g}")
    if report.test is None:
        print(f"kruskal-wallis skipped: {report.note}")
    else:
        _print_test(report.test)
        return _degenerate_exit(report.test, cfg["strict"])
    return EXIT_OK


def _print_test(result: stats.TestResult) -> None:
    flag = "  [degenerate]" if result.degenerate else ""
    print(f"{result.method}: statistic {result.statistic:.6g}  "
          f"p-value {result.p_value:.6g}  df {result.df}{flag}")
    if result.notes:
        print(f"  note: {result.notes}")


def _degenerate_exit(result: stats.TestResult, strict: bool) -> int:
    if result.degenerate and strict:
        print("degenerate statistics treated as error (--strict)", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg = _merged(args, {
        "power_a": harness.DEFAULT_POWER_A, "power_b": harness.DEFAULT_POWER_B,
        "strict": False,
    })
    recs_a = harness.read_records(args.csv_a)
    recs_b = harness.read_records(args.csv_b)
    if not recs_a or not recs_b:
        raise UsageError("both CSV files must contain at least one run")
    report = harness.compute_speedup(
        [r.wall_time_s for r in recs_a],
        [r.wall_time_s for r in recs_b],
        power_a=float(cfg["power_a"]),
        power_b=float(cfg["power_b"]),
    )
    print(f"mean time A {report.mean_time_a:.6g} s   mean time B {report.mean_time_b:.6g} s")
    print(f"speedup {report.speedup:.6g}   power ratio {report.power_ratio:.6g}   "
          f"rectified efficiency {report.rectified_efficiency:.6g}")

    worst = EXIT_OK
    by_fn_a = _pivot_runs(recs_a)
    by_fn_b = _pivot_runs(recs_b)
    for function in sorted(set(by_fn_a) & set(by_fn_b)):
        shared = sorted(set(by_fn_a[function]) & set(by_fn_b[function]))
        if len(shared) < 2:
            print(f"{function}: fewer than 2 paired runs, skipping precision test")
            continue
        blocks = np.array(
            [[by_fn_a[function][rid], by_fn_b[function][rid]] for rid in shared]
        )
        result = stats.friedman(blocks)
        print(f"{function}: ", end="")
        _print_test(result)
        worst = max(worst, _degenerate_exit(result, cfg["strict"]))
    return worst


def _pivot_runs(records) -> dict:
    out: dict = {}
    for rec in records:
        out.setdefault(rec.function, {})[rec.run_id] = rec.best_fitness
    return out


def _cmd_stats(args) -> int:
    cfg = _merged(args, {
        "group_by": "schedule", "value": "best_fitness", "block_by": "run_id",
        "strict": False,
    })
    records = harness.read_records(args.input)
    if not records:
        raise UsageError(f"no records in {args.input}")
    rows = [rec.scalar_row() for rec in records]
    value_col = cfg["value"]
    if value_col not in rows[0]:
        raise UsageError(f"unknown value column {value_col!r}")

    def group_key(row):
        return tuple(str(row[c.strip()]) for c in cfg["group_by"].split(","))

    try:
        if args.test == "normality":
            result = stats.normality([float(r[value_col]) for r in rows])
        elif args.test == "friedman":
            blocks: dict = {}
            for r in rows:
                blocks.setdefault(r[cfg["block_by"]], {})[group_key(r)] = float(r[value_col])
            treatments = sorted({k for b in blocks.values() for k in b})
            matrix = []
            for _, b in sorted(blocks.items()):
                if set(b) != set(treatments):
                    raise UsageError("friedman needs every block to cover every group")
                matrix.append([b[t] for t in treatments])
            result = stats.friedman(np.asarray(matrix))
        else:
            grouped: dict = {}
            for r in rows:
                grouped.setdefault(group_key(r), []).append(float(r[value_col]))
            groups = [grouped[k] for k in sorted(grouped)]
            if args.test == "kruskal":
                result = stats.kruskal_wallis(groups)
            elif args.test == "bartlett":
                result = stats.variance_homogeneity(groups, "bartlett")
            elif args.test == "levene":
                result = stats.variance_homogeneity(groups, "levene-mean")
            else:  # ttest
                if len(groups) != 2:
                    raise UsageError(
                        f"ttest needs exactly 2 groups, {cfg['group_by']!r} gives {len(groups)}"
                    )
                result = stats.t_test_independent(groups[0], groups[1])
    except KeyError as exc:
        raise UsageError(f"unknown column {exc}")
    except stats.DegenerateDataError as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE if cfg["strict"] else EXIT_OK
    _print_test(result)
    return _degenerate_exit(result, cfg["strict"])


def _cmd_plot_data(args) -> int:
    _merged(args, {"strict": False})
    if args.kind == "trajectory":
        rows = harness.read_trajectory_rows(args.input)
        harness.write_trajectory_rows(rows, args.out)
    else:
        records = harness.read_records(args.input)
        harness.emit_plot_data(records, args.kind, args.out)
    print(f"plot data -> {args.out}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "stats": _cmd_stats,
    "plot-data": _cmd_plot_data,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
