"""Sequential simplified-swarm engine.

Each coordinate of each particle is updated once per iteration by a
four-way choice driven by one uniform deviate u:

    keep the current value        if u in [0, cw)
    copy the personal best        if u in [cw, cp)
    copy the global best          if u in [cp, cg)
    draw fresh from the box       if u in [cg, 1)

The sequential schedule processes particles in index order and updates
the personal/global bests immediately, so later particles inside the
same iteration already see improvements made by earlier ones.  The
phased engine in :mod:`sso.parallel` shares every helper here (deviate
layout, update composition, row evaluation), which is what makes the
two schedules coincide exactly when there is a single particle.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .benchmarks import BenchmarkFn
from .records import RunRecord, ScheduleKind
from .rng import RngStream, SubStream

__all__ = [
    "SsoParams",
    "Swarm",
    "NonFiniteFitnessError",
    "step_update_variable",
    "initialize",
    "run_sequential",
]

ObjectiveFn = Callable[[np.ndarray], float]


class NonFiniteFitnessError(RuntimeError):
    """The objective produced NaN or infinity; coordinates identify the call."""

    def __init__(self, value: float, particle: int, iteration: Optional[int] = None):
        self.value = value
        self.particle = particle
        self.iteration = iteration
        where = "during initialization" if iteration is None else f"at iteration {iteration}"
        super().__init__(
            f"objective returned non-finite value {value!r} for particle {particle} {where}"
        )


@dataclass(frozen=True)
class SsoParams:
    """Algorithm constants: cumulative branch thresholds, box bounds, and sizes."""

    cw: float
    cp: float
    cg: float
    var_min: float
    var_max: float
    nsol: int
    nvar: int
    niter: int

    def __post_init__(self):
        if not (0.0 <= self.cw <= self.cp <= self.cg <= 1.0):
            raise ValueError(
                f"thresholds must satisfy 0 <= cw <= cp <= cg <= 1, "
                f"got ({self.cw}, {self.cp}, {self.cg})"
            )
        if not self.var_min < self.var_max:
            raise ValueError(
                f"need var_min < var_max, got [{self.var_min}, {self.var_max}]"
            )
        for label, n in (("nsol", self.nsol), ("nvar", self.nvar), ("niter", self.niter)):
            if not isinstance(n, (int, np.integer)) or n < 1:
                raise ValueError(f"{label} must be a positive integer, got {n!r}")

    @property
    def span(self) -> float:
        return self.var_max - self.var_min


@dataclass(eq=False)
class Swarm:
    """Positions, personal bests, and the global best with cached fitnesses."""

    sol: np.ndarray  # (nsol, nvar) current positions
    pbests: np.ndarray  # (nsol, nvar) personal-best positions
    gbest: np.ndarray  # (nvar,) global-best position
    sol_f: np.ndarray  # (nsol,) fitness of sol
    p_f: np.ndarray  # (nsol,) fitness of pbests
    g_f: float  # fitness of gbest

    @property
    def nsol(self) -> int:
        return self.sol.shape[0]

    @property
    def nvar(self) -> int:
        return self.sol.shape[1]

    def copy(self) -> "Swarm":
        return Swarm(
            sol=self.sol.copy(),
            pbests=self.pbests.copy(),
            gbest=self.gbest.copy(),
            sol_f=self.sol_f.copy(),
            p_f=self.p_f.copy(),
            g_f=self.g_f,
        )


def step_update_variable(
    x: float,
    p: float,
    g: float,
    u: float,
    fresh: float,
    params: SsoParams,
) -> float:
    """The per-coordinate four-way update rule (scalar reference form)."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"branch deviate must lie in [0, 1), got {u!r}")
    if u < params.cw:
        return x
    if u < params.cp:
        return p
    if u < params.cg:
        return g
    return fresh


def _draw_update_fields(
    rng: RngStream,
    params: SsoParams,
    iteration: int,
    row_lo: int,
    row_hi: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Branch deviates and (masked) fresh values for a block of particles.

    Fresh replacement values are generated only at coordinates where the
    last branch fires, so the deviate budget is one branch draw per
    coordinate plus one fresh draw per last-branch event.
    """
    u = rng.matrix(SubStream.BRANCH, iteration, row_lo, row_hi, params.nvar)
    fresh = np.zeros_like(u)
    ii, jj = np.nonzero(u >= params.cg)
    if ii.size:
        raw = rng.uniform(SubStream.FRESH, iteration, ii + row_lo, jj)
        fresh[ii, jj] = params.var_min + params.span * raw
    return u, fresh


def _compose_update(
    u: np.ndarray,
    fresh: np.ndarray,
    sol: np.ndarray,
    pbests: np.ndarray,
    gbest: np.ndarray,
    params: SsoParams,
) -> np.ndarray:
    """Vectorized form of :func:`step_update_variable` over any block shape."""
    return np.where(
        u < params.cw,
        sol,
        np.where(u < params.cp, pbests, np.where(u < params.cg, gbest, fresh)),
    )


def _eval_rows(f: ObjectiveFn, block: np.ndarray) -> np.ndarray:
    """Fitness of each row of a (n, nvar) block.

    Benchmark objectives evaluate the whole block in one call (bitwise
    identical to row-by-row); plain callables are mapped per row.
    """
    if isinstance(f, BenchmarkFn):
        out = np.asarray(f(block), dtype=np.float64)
        if out.shape != (block.shape[0],):
            raise ValueError("batch objective returned wrong shape")
        return out
    return np.array([float(f(row)) for row in block], dtype=np.float64)


def _check_finite(values: np.ndarray, row_lo: int, iteration: Optional[int]) -> None:
    if not np.isfinite(values).all():
        bad = int(np.nonzero(~np.isfinite(values))[0][0])
        raise NonFiniteFitnessError(float(values[bad]), row_lo + bad, iteration)


def initialize(params: SsoParams, f: ObjectiveFn, rng: RngStream) -> Swarm:
    """Draw the initial population uniformly inside the box and score it."""
    u = rng.matrix(SubStream.INIT, 0, 0, params.nsol, params.nvar)
    sol = params.var_min + params.span * u
    sol_f = _eval_rows(f, sol)
    _check_finite(sol_f, 0, None)
    best = int(np.argmin(sol_f))  # argmin takes the lowest index on ties
    return Swarm(
        sol=sol,
        pbests=sol.copy(),
        gbest=sol[best].copy(),
        sol_f=sol_f,
        p_f=sol_f.copy(),
        g_f=float(sol_f[best]),
    )


def run_sequential(params: SsoParams, f: ObjectiveFn, seed: int) -> RunRecord:
    """Run the per-particle asynchronous schedule for the full iteration budget.

    Timing covers the optimization loop only, not initialization.
    """
    rng = RngStream(seed)
    swarm = initialize(params, f, rng)
    trajectory = np.empty(params.niter, dtype=np.float64)

    start = time.perf_counter()
    for t in range(params.niter):
        u, fresh = _draw_update_fields(rng, params, t, 0, params.nsol)
        for i in range(params.nsol):
            row = _compose_update(
                u[i], fresh[i], swarm.sol[i], swarm.pbests[i], swarm.gbest, params
            )
            swarm.sol[i] = row
            fx = float(_eval_rows(f, row[None, :])[0])
            if not np.isfinite(fx):
                raise NonFiniteFitnessError(fx, i, t)
            swarm.sol_f[i] = fx
            if fx <= swarm.p_f[i]:
                swarm.pbests[i] = row
                swarm.p_f[i] = fx
                if fx <= swarm.g_f:
                    swarm.gbest[:] = swarm.pbests[i]
                    swarm.g_f = fx
        trajectory[t] = swarm.g_f
    wall = time.perf_counter() - start

    return RunRecord(
        run_id=0,
        schedule=ScheduleKind.SEQUENTIAL,
        function=getattr(f, "id", "custom"),
        nsol=params.nsol,
        nvar=params.nvar,
        niter=params.niter,
        cw=params.cw,
        cp=params.cp,
        cg=params.cg,
        seed=seed,
        best_fitness=swarm.g_f,
        wall_time_s=wall,
        best_position=swarm.gbest.copy(),
        trajectory=trajectory,
    )
