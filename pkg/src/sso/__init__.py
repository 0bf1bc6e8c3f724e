"""Simplified swarm optimization: sequential and barrier-synchronized engines,
benchmark suite, nonparametric statistics, and an experiment harness."""

from .benchmarks import BenchmarkFn, FUNCTION_IDS, list_suite, make_function
from .core import (
    NonFiniteFitnessError,
    SsoParams,
    Swarm,
    initialize,
    run_sequential,
    step_update_variable,
)
from .parallel import (
    LayoutMode,
    Schedule,
    convert_layout,
    evaluate_phase,
    run_parallel,
    search_phase,
    update_gbest_phase,
    update_pbests_phase,
)
from .records import RunRecord, ScheduleKind
from .rng import RngStream, SubStream

__all__ = [
    "BenchmarkFn",
    "FUNCTION_IDS",
    "LayoutMode",
    "NonFiniteFitnessError",
    "RngStream",
    "RunRecord",
    "Schedule",
    "ScheduleKind",
    "SsoParams",
    "SubStream",
    "Swarm",
    "convert_layout",
    "evaluate_phase",
    "initialize",
    "list_suite",
    "make_function",
    "run_parallel",
    "run_sequential",
    "search_phase",
    "step_update_variable",
    "update_gbest_phase",
    "update_pbests_phase",
]

__version__ = "0.1.0"
