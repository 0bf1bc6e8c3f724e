"""Run-level result records shared by the engines and the harness."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["ScheduleKind", "RunRecord"]


class ScheduleKind(str, enum.Enum):
    """How particle updates are interleaved within an iteration."""

    SEQUENTIAL = "sequential"  # per-particle: later particles see this iteration's gbest updates
    PARALLEL = "parallel"  # phased: search/evaluate/update run for all particles between barriers

    def __str__(self) -> str:  # CSV and CLI token
        return self.value


@dataclass
class RunRecord:
    """One optimization run: configuration snapshot plus its outcome.

    ``best_position`` and ``trajectory`` are in-memory extras; the CSV
    schema written by the harness carries only the scalar columns.
    """

    run_id: int
    schedule: ScheduleKind
    function: str
    nsol: int
    nvar: int
    niter: int
    cw: float
    cp: float
    cg: float
    seed: int
    best_fitness: float
    wall_time_s: float
    # array extras are excluded from equality (record identity is the scalar view)
    best_position: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    trajectory: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def scalar_row(self) -> dict:
        """The CSV-representable view, in schema column order."""
        return {
            "run_id": self.run_id,
            "schedule": str(self.schedule),
            "function": self.function,
            "nsol": self.nsol,
            "nvar": self.nvar,
            "niter": self.niter,
            "cw": self.cw,
            "cp": self.cp,
            "cg": self.cg,
            "seed": self.seed,
            "best_fitness": self.best_fitness,
            "wall_time_s": self.wall_time_s,
        }
