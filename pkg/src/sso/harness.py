"""Experiment orchestration: repeated runs, sweeps, speedup metrics, CSV I/O.

The harness owns everything around the engines: seeding (base seed plus
run index), the results CSV schema, per-cell summary statistics, the
speedup/power arithmetic, the threshold sweep with its Kruskal-Wallis
comparison, and plot-ready data files.  Experiment cells run
sequentially by default so wall-time measurements are uncontended.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .benchmarks import BenchmarkFn, make_function
from .core import SsoParams, run_sequential
from .parallel import LayoutMode, run_parallel
from .records import RunRecord, ScheduleKind
from .stats import TestResult, kruskal_wallis

__all__ = [
    "CSV_HEADER",
    "DEFAULT_TRIPLES",
    "ExperimentConfig",
    "ExperimentReport",
    "SpeedupReport",
    "SummaryRow",
    "SweepConfig",
    "SweepReport",
    "compute_speedup",
    "emit_plot_data",
    "parameter_sweep",
    "read_records",
    "run_experiment",
    "summarize",
    "write_records",
    "write_summary",
    "write_trajectories",
]

CSV_HEADER = "run_id,schedule,function,nsol,nvar,niter,cw,cp,cg,seed,best_fitness,wall_time_s"

#: the six threshold combinations of the reference sweep
DEFAULT_TRIPLES = (
    (0.1, 0.3, 0.7),
    (0.1, 0.4, 0.8),
    (0.2, 0.4, 0.6),
    (0.2, 0.5, 0.9),
    (0.3, 0.4, 0.5),
    (0.3, 0.6, 0.8),
)

# defaults mirror the reference experimental setup: population 100,
# dimension 50, 1000 iterations, thresholds (0.3, 0.6, 0.8), 20 runs,
# a block-size note of 1024 kept as provenance only
DEFAULT_NSOL = 100
DEFAULT_NVAR = 50
DEFAULT_NITER = 1000
DEFAULT_THRESHOLDS = (0.3, 0.6, 0.8)
DEFAULT_REPLICATIONS = 20
DEFAULT_BLOCK_SIZE = 1024
DEFAULT_POWER_A = 84.0
DEFAULT_POWER_B = 180.0


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


@dataclass(frozen=True)
class SummaryRow:
    function: str
    schedule: ScheduleKind
    n: int
    mean: float
    std: Optional[float]  # absent (not zero) for a single replication
    min: float


@dataclass(frozen=True)
class SpeedupReport:
    """Mean-time ratio and the power-rectified efficiency identities."""

    mean_time_a: float
    mean_time_b: float
    speedup: float
    power_a: float
    power_b: float
    power_ratio: float
    rectified_efficiency: float
    nsol: Optional[int] = None


@dataclass
class ExperimentConfig:
    functions: Sequence[Union[str, BenchmarkFn]] = ("f1",)
    schedules: Sequence[ScheduleKind] = (ScheduleKind.SEQUENTIAL, ScheduleKind.PARALLEL)
    replications: int = DEFAULT_REPLICATIONS
    base_seed: int = 0
    nsol: int = DEFAULT_NSOL
    nvar: int = DEFAULT_NVAR
    niter: int = DEFAULT_NITER
    cw: float = DEFAULT_THRESHOLDS[0]
    cp: float = DEFAULT_THRESHOLDS[1]
    cg: float = DEFAULT_THRESHOLDS[2]
    workers: int = 1
    layout: LayoutMode = LayoutMode.PARTICLE_MAJOR
    record_trajectory: bool = False
    parallel_cells: bool = False  # opt-in; contends wall-time measurements
    block_size: int = DEFAULT_BLOCK_SIZE  # provenance only, no semantic effect

    def __post_init__(self):
        if not self.functions:
            raise ValueError("config key 'functions' must list at least one function")
        if not self.schedules:
            raise ValueError("config key 'schedules' must list at least one schedule")
        self.schedules = [ScheduleKind(s) for s in self.schedules]
        self.layout = LayoutMode(self.layout)
        if not 0.0 <= self.cw <= self.cp <= self.cg <= 1.0:
            raise ValueError(
                f"thresholds must satisfy 0 <= cw <= cp <= cg <= 1, "
                f"got ({self.cw}, {self.cp}, {self.cg})"
            )
        for key in ("replications", "nsol", "nvar", "niter", "workers"):
            if int(getattr(self, key)) < 1:
                raise ValueError(f"config key {key!r} must be >= 1")


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list[RunRecord]
    summaries: list[SummaryRow]
    metadata: dict = field(default_factory=dict)


def _resolve_function(entry: Union[str, BenchmarkFn], nvar: int) -> BenchmarkFn:
    if isinstance(entry, BenchmarkFn):
        return entry
    return make_function(entry, nvar)


def _run_one(fn: BenchmarkFn, config: ExperimentConfig, schedule: ScheduleKind,
             run_id: int) -> RunRecord:
    params = SsoParams(
        cw=config.cw, cp=config.cp, cg=config.cg,
        var_min=fn.var_min, var_max=fn.var_max,
        nsol=config.nsol, nvar=config.nvar, niter=config.niter,
    )
    seed = config.base_seed + run_id
    if schedule is ScheduleKind.SEQUENTIAL:
        rec = run_sequential(params, fn, seed)
    else:
        rec = run_parallel(params, fn, seed, workers=config.workers, layout=config.layout)
    rec = replace(rec, run_id=run_id, function=fn.id)
    if not config.record_trajectory:
        rec = replace(rec, trajectory=None)
    return rec


def summarize(records: Sequence[RunRecord]) -> list[SummaryRow]:
    """Per (function, schedule) mean/std/min of best fitness, in record order."""
    cells: dict[tuple[str, ScheduleKind], list[float]] = {}
    for rec in records:
        cells.setdefault((rec.function, rec.schedule), []).append(rec.best_fitness)
    rows = []
    for (function, schedule), values in cells.items():
        arr = np.asarray(values)
        rows.append(
            SummaryRow(
                function=function,
                schedule=schedule,
                n=arr.size,
                mean=float(arr.mean()),
                std=float(arr.std(ddof=1)) if arr.size > 1 else None,
                min=float(arr.min()),
            )
        )
    return rows


class _CsvSink:
    """Incremental record writer: rows are flushed as they are produced, and
    a failure marker is appended if the experiment dies midway."""

    def __init__(self, path: Optional[Path]):
        self._fh = None
        if path is not None:
            self._fh = open(path, "w", encoding="utf-8")
            self._fh.write(CSV_HEADER + "\n")
            self._fh.flush()

    def write(self, rec: RunRecord) -> None:
        if self._fh is None:
            return
        row = rec.scalar_row()
        self._fh.write(",".join(_fmt(row[col]) for col in CSV_HEADER.split(",")) + "\n")
        self._fh.flush()

    def fail(self, exc: BaseException) -> None:
        if self._fh is None:
            return
        self._fh.write(f"# FAILED: {type(exc).__name__}: {exc}\n")
        self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def run_experiment(
    config: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    summary_out: Optional[Union[str, Path]] = None,
) -> ExperimentReport:
    """Run every (function, schedule) cell with seeds base_seed + run_id.

    With ``out`` set, records stream to CSV as they complete; a failure
    mid-experiment leaves the completed rows plus a ``# FAILED`` marker.
    """
    functions = [_resolve_function(entry, config.nvar) for entry in config.functions]
    cells = [(fn, schedule) for fn in functions for schedule in config.schedules]
    sink = _CsvSink(Path(out) if out is not None else None)
    records: list[RunRecord] = []

    def run_cell(cell):
        fn, schedule = cell
        return [_run_one(fn, config, schedule, rid) for rid in range(config.replications)]

    try:
        if config.parallel_cells and len(cells) > 1:
            with ThreadPoolExecutor() as pool:
                for cell_records in pool.map(run_cell, cells):
                    for rec in cell_records:
                        sink.write(rec)
                        records.append(rec)
        else:
            for cell in cells:
                for rid in range(config.replications):
                    rec = _run_one(cell[0], config, cell[1], rid)
                    sink.write(rec)
                    records.append(rec)
    except BaseException as exc:
        sink.fail(exc)
        raise
    finally:
        sink.close()

    report = ExperimentReport(
        config=config,
        records=records,
        summaries=summarize(records),
        metadata={"block_size": config.block_size},
    )
    if summary_out is not None:
        write_summary(report.summaries, summary_out)
    return report


def write_records(records: Sequence[RunRecord], path: Union[str, Path]) -> None:
    sink = _CsvSink(Path(path))
    try:
        for rec in records:
            sink.write(rec)
    finally:
        sink.close()


def read_records(path: Union[str, Path]) -> list[RunRecord]:
    """Read a results CSV back into records (scalar columns only)."""
    records = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 12:
                raise ValueError(f"malformed row: {line!r}")
            records.append(
                RunRecord(
                    run_id=int(parts[0]),
                    schedule=ScheduleKind(parts[1]),
                    function=parts[2],
                    nsol=int(parts[3]),
                    nvar=int(parts[4]),
                    niter=int(parts[5]),
                    cw=float(parts[6]),
                    cp=float(parts[7]),
                    cg=float(parts[8]),
                    seed=int(parts[9]),
                    best_fitness=float(parts[10]),
                    wall_time_s=float(parts[11]),
                )
            )
    return records


def write_summary(summaries: Sequence[SummaryRow], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("function,schedule,n,mean,std,min\n")
        for row in summaries:
            std = "" if row.std is None else repr(row.std)
            fh.write(
                f"{row.function},{row.schedule},{row.n},{row.mean!r},{std},{row.min!r}\n"
            )


TRAJECTORY_HEADER = "# columns: run_id schedule function iteration gbest_fitness"


def write_trajectories(records: Sequence[RunRecord], path: Union[str, Path]) -> None:
    """Sidecar file with the per-iteration global-best curve of each run."""
    rows = []
    for rec in records:
        if rec.trajectory is None:
            continue
        for t, value in enumerate(rec.trajectory):
            rows.append((rec.run_id, str(rec.schedule), rec.function, t, float(value)))
    write_trajectory_rows(rows, path)


def write_trajectory_rows(rows, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for run_id, schedule, function, t, value in rows:
            fh.write(f"{run_id} {schedule} {function} {t} {value!r}\n")


def read_trajectory_rows(path: Union[str, Path]) -> list[tuple]:
    """Parse a trajectory sidecar back into (run_id, schedule, function, t, value) rows."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            run_id, schedule, function, t, value = line.split()
            rows.append((int(run_id), schedule, function, int(t), float(value)))
    if not rows:
        raise ValueError(f"no trajectory rows in {path}")
    return rows


def compute_speedup(
    times_a: Sequence[float],
    times_b: Sequence[float],
    power_a: float,
    power_b: float,
    nsol: Optional[int] = None,
) -> SpeedupReport:
    """Speedup = mean(times_a)/mean(times_b); rectified efficiency divides it
    by the device power ratio power_b/power_a."""
    ta = np.asarray(times_a, dtype=np.float64)
    tb = np.asarray(times_b, dtype=np.float64)
    if ta.size == 0 or tb.size == 0:
        raise ValueError("time samples must be nonempty")
    if (ta <= 0).any() or (tb <= 0).any():
        raise ValueError("wall times must be positive")
    if power_a <= 0 or power_b <= 0:
        raise ValueError("power ratings must be positive")
    mean_a = float(ta.mean())
    mean_b = float(tb.mean())
    speedup = mean_a / mean_b
    power_ratio = power_b / power_a
    return SpeedupReport(
        mean_time_a=mean_a,
        mean_time_b=mean_b,
        speedup=speedup,
        power_a=power_a,
        power_b=power_b,
        power_ratio=power_ratio,
        rectified_efficiency=speedup / power_ratio,
        nsol=nsol,
    )


@dataclass
class SweepConfig:
    function: Union[str, BenchmarkFn] = "f1"
    triples: Sequence[tuple[float, float, float]] = DEFAULT_TRIPLES
    replications: int = DEFAULT_REPLICATIONS
    base_seed: int = 0
    nsol: int = DEFAULT_NSOL
    nvar: int = DEFAULT_NVAR
    niter: int = DEFAULT_NITER
    workers: int = 1
    schedule: ScheduleKind = ScheduleKind.PARALLEL


@dataclass
class SweepReport:
    config: SweepConfig
    records: list[RunRecord]
    groups: dict[tuple[float, float, float], list[float]]
    summaries: list[SummaryRow]
    test: Optional[TestResult]
    note: Optional[str] = None


def parameter_sweep(config: SweepConfig) -> SweepReport:
    """Run every threshold triple and compare the groups with Kruskal-Wallis."""
    fn = _resolve_function(config.function, config.nvar)
    # reject malformed triples before spending any compute
    for triple in config.triples:
        SsoParams(
            cw=triple[0], cp=triple[1], cg=triple[2],
            var_min=fn.var_min, var_max=fn.var_max,
            nsol=config.nsol, nvar=config.nvar, niter=config.niter,
        )

    records: list[RunRecord] = []
    groups: dict[tuple[float, float, float], list[float]] = {}
    for triple in config.triples:
        cell = ExperimentConfig(
            functions=[fn],
            schedules=[config.schedule],
            replications=config.replications,
            base_seed=config.base_seed,
            nsol=config.nsol,
            nvar=config.nvar,
            niter=config.niter,
            cw=triple[0], cp=triple[1], cg=triple[2],
            workers=config.workers,
        )
        cell_records = run_experiment(cell).records
        records.extend(cell_records)
        groups[tuple(triple)] = [rec.best_fitness for rec in cell_records]

    summaries = summarize(records)
    if len(groups) < 2:
        return SweepReport(config, records, groups, summaries, test=None,
                           note="only one combination swept; no between-group comparison")
    test = kruskal_wallis(list(groups.values()))
    return SweepReport(config, records, groups, summaries, test=test)


PLOT_KINDS = ("trajectory", "precision-box", "speedup-curve")


def emit_plot_data(
    report: Union[ExperimentReport, Sequence[RunRecord]],
    kind: str,
    path: Union[str, Path],
) -> Path:
    """Write plain-text columnar data for external plotting tools."""
    records = report.records if isinstance(report, ExperimentReport) else list(report)
    path = Path(path)
    if kind == "trajectory":
        if not any(rec.trajectory is not None for rec in records):
            raise ValueError("no trajectories recorded; rerun with trajectory recording on")
        write_trajectories(records, path)
        return path

    buf = io.StringIO()
    if kind == "precision-box":
        buf.write("# columns: schedule function run_id best_fitness\n")
        for rec in records:
            buf.write(f"{rec.schedule} {rec.function} {rec.run_id} {rec.best_fitness!r}\n")
    elif kind == "speedup-curve":
        by_nsol: dict[int, dict[ScheduleKind, list[float]]] = {}
        for rec in records:
            by_nsol.setdefault(rec.nsol, {}).setdefault(rec.schedule, []).append(
                rec.wall_time_s
            )
        buf.write(
            "# columns: nsol mean_time_sequential_s mean_time_parallel_s speedup\n"
        )
        for nsol in sorted(by_nsol):
            times = by_nsol[nsol]
            if set(times) != {ScheduleKind.SEQUENTIAL, ScheduleKind.PARALLEL}:
                raise ValueError(
                    f"speedup curve needs both schedules at nsol={nsol}, "
                    f"got {sorted(str(s) for s in times)}"
                )
            mean_seq = float(np.mean(times[ScheduleKind.SEQUENTIAL]))
            mean_par = float(np.mean(times[ScheduleKind.PARALLEL]))
            buf.write(f"{nsol} {mean_seq!r} {mean_par!r} {mean_seq / mean_par!r}\n")
    else:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")

    path.write_text(buf.getvalue(), encoding="utf-8")
    return path
