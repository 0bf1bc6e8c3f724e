"""Barrier-synchronized phased engine.

One iteration runs four phases over the whole population, each separated
by a full barrier:

    search -> evaluate -> update personal bests -> update global best

During search every particle reads the personal/global bests as they
stood at phase entry, so improvements become visible only at the next
iteration, the defining difference from the sequential schedule.  The
worker pool partitions particles into contiguous index ranges; because
deviates are keyed by coordinate (see :mod:`sso.rng`), writes are
row-disjoint, and the global-best step is a deterministic lexicographic
min-reduce over ``(fitness, particle index)``, the result is bit-identical
for any worker count.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    NonFiniteFitnessError,
    ObjectiveFn,
    SsoParams,
    Swarm,
    _check_finite,
    _compose_update,
    _draw_update_fields,
    _eval_rows,
    initialize,
)
from .records import RunRecord, ScheduleKind
from .rng import RngStream

__all__ = [
    "LayoutMode",
    "Schedule",
    "convert_layout",
    "search_phase",
    "evaluate_phase",
    "update_pbests_phase",
    "update_gbest_phase",
    "run_parallel",
]


class LayoutMode(str, enum.Enum):
    """Storage order of the (nsol, nvar) matrices; has no semantic effect."""

    PARTICLE_MAJOR = "particle-major"  # each particle's coordinates contiguous
    INTERLEAVED = "interleaved"  # coordinate j of all particles contiguous

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Schedule:
    """Which engine to run and, for the phased one, how many workers."""

    kind: ScheduleKind
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


def convert_layout(data: np.ndarray, src: LayoutMode, dst: LayoutMode) -> np.ndarray:
    """Re-store a matrix in the requested order; logical indexing is unchanged."""
    data = np.asarray(data)
    if data.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {data.shape}")
    if src == dst:
        return data
    if dst is LayoutMode.INTERLEAVED:
        return np.asfortranarray(data)
    return np.ascontiguousarray(data)


def _apply_layout(swarm: Swarm, layout: LayoutMode) -> Swarm:
    swarm.sol = convert_layout(swarm.sol, LayoutMode.PARTICLE_MAJOR, layout)
    swarm.pbests = convert_layout(swarm.pbests, LayoutMode.PARTICLE_MAJOR, layout)
    return swarm


def _search_slice(swarm: Swarm, params: SsoParams, rng: RngStream, iteration: int,
                  pbests_in: np.ndarray, gbest_in: np.ndarray, lo: int, hi: int) -> None:
    u, fresh = _draw_update_fields(rng, params, iteration, lo, hi)
    swarm.sol[lo:hi] = _compose_update(
        u, fresh, swarm.sol[lo:hi], pbests_in[lo:hi], gbest_in, params
    )


def _evaluate_slice(swarm: Swarm, f: ObjectiveFn, iteration, lo: int, hi: int) -> None:
    block = swarm.sol[lo:hi]
    values = _eval_rows(f, block)
    _check_finite(values, lo, iteration)
    swarm.sol_f[lo:hi] = values


def _update_pbests_slice(swarm: Swarm, lo: int, hi: int) -> None:
    improved = swarm.sol_f[lo:hi] <= swarm.p_f[lo:hi]
    rows = lo + np.nonzero(improved)[0]
    swarm.pbests[rows] = swarm.sol[rows]
    swarm.p_f[rows] = swarm.sol_f[rows]


def _gbest_candidate(swarm: Swarm, lo: int, hi: int) -> tuple[float, int]:
    k = int(np.argmin(swarm.p_f[lo:hi]))
    return float(swarm.p_f[lo + k]), lo + k


def search_phase(swarm: Swarm, params: SsoParams, rng: RngStream, iteration: int) -> Swarm:
    """Rewrite every position from the phase-entry personal/global bests."""
    _search_slice(swarm, params, rng, iteration, swarm.pbests, swarm.gbest, 0, swarm.nsol)
    return swarm


def evaluate_phase(swarm: Swarm, f: ObjectiveFn, iteration=None) -> Swarm:
    """Refresh ``sol_f`` from the current positions; nothing else is touched."""
    _evaluate_slice(swarm, f, iteration, 0, swarm.nsol)
    return swarm


def update_pbests_phase(swarm: Swarm) -> Swarm:
    """Row-independent paired comparison; equal fitness refreshes the incumbent."""
    _update_pbests_slice(swarm, 0, swarm.nsol)
    return swarm


def update_gbest_phase(swarm: Swarm) -> Swarm:
    """Min-reduce over (p_f, index); the incumbent survives only if strictly better."""
    best_f, best_i = _gbest_candidate(swarm, 0, swarm.nsol)
    if best_f <= swarm.g_f:
        swarm.g_f = best_f
        swarm.gbest[:] = swarm.pbests[best_i]
    return swarm


def _partition(nsol: int, workers: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, nsol, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_parallel(
    params: SsoParams,
    f: ObjectiveFn,
    seed: int,
    workers: int = 1,
    layout: LayoutMode = LayoutMode.PARTICLE_MAJOR,
) -> RunRecord:
    """Run the phased schedule; the result depends only on (params, f, seed).

    ``workers`` and ``layout`` affect wall time, never the output: every
    deviate is keyed by coordinate, slices are row-disjoint, and the
    global-best reduction is order-independent.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    layout = LayoutMode(layout)
    rng = RngStream(seed)
    swarm = _apply_layout(initialize(params, f, rng), layout)
    trajectory = np.empty(params.niter, dtype=np.float64)
    slices = _partition(params.nsol, workers)

    pool = ThreadPoolExecutor(max_workers=len(slices)) if len(slices) > 1 else None

    def barrier_phase(fn, *args):
        # dispatching one slice per worker and joining them all is the
        # inter-phase barrier: no worker enters the next phase early
        if pool is None:
            fn(*args, slices[0][0], slices[0][1])
            return
        futures = [pool.submit(fn, *args, lo, hi) for lo, hi in slices]
        for fut in futures:
            fut.result()

    candidates: list = [None] * len(slices)

    def _gbest_slice(k: int, lo: int, hi: int) -> None:
        candidates[k] = _gbest_candidate(swarm, lo, hi)

    start = time.perf_counter()
    try:
        for t in range(params.niter):
            # search reads bests frozen at phase entry; they are only
            # written by later phases, so the live arrays are that snapshot
            barrier_phase(_search_slice, swarm, params, rng, t, swarm.pbests, swarm.gbest)
            barrier_phase(_evaluate_slice, swarm, f, t)
            barrier_phase(_update_pbests_slice, swarm)

            if pool is None:
                candidates[0] = _gbest_candidate(swarm, 0, params.nsol)
            else:
                futures = [
                    pool.submit(_gbest_slice, k, lo, hi)
                    for k, (lo, hi) in enumerate(slices)
                ]
                for fut in futures:
                    fut.result()
            best_f, best_i = min(candidates)
            if best_f <= swarm.g_f:
                swarm.g_f = best_f
                swarm.gbest[:] = swarm.pbests[best_i]
            trajectory[t] = swarm.g_f
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)
    wall = time.perf_counter() - start

    return RunRecord(
        run_id=0,
        schedule=ScheduleKind.PARALLEL,
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
