"""Counter-based random number supply for the swarm engines.

Every deviate is a pure function of ``(seed, sub-stream, iteration,
particle, variable)``; there is no sequential generator state.  This is
what makes the phased engine reproducible: a worker computing particle
37's draws gets the same bits whether it owns rows 0..49 or 30..39, and
the sequential schedule consumes the exact same deviate at the exact
same coordinate as the phased one.

The generator hashes the key fields through the SplitMix64 finalizer
(Steele, Lea & Flood, 2014).  Each field is folded in via a
golden-ratio multiply followed by the full avalanche mix, so adjacent
keys (particle 4 vs 5, iteration 812 vs 813) produce statistically
independent outputs.  Uniformity and branch-frequency checks live in
the test suite.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "SubStream"]

_MASK64 = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 2.0 ** -53


class SubStream(enum.IntEnum):
    """Independent deviate families drawn at the same (iteration, i, j) key."""

    BRANCH = 0x243F6A8885A308D3  # picks the four-way update branch
    FRESH = 0x13198A2E03707344  # replacement value when the last branch fires
    INIT = 0xA4093822299F31D0  # initial position of every coordinate


def _u64(x) -> np.ndarray:
    # always operate on ndarrays: numpy scalars warn on wraparound and
    # int64 operands would promote the whole expression to float64
    return np.asarray(x, dtype=np.uint64)


def _mix(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):  # modular wraparound is the point
        z = (z ^ (z >> 30)) * _MIX1
        z = (z ^ (z >> 27)) * _MIX2
        return z ^ (z >> 31)


def _fold(h: np.ndarray, field: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        keyed = h ^ (_GAMMA * (field + np.uint64(1)))
    return _mix(keyed)


@dataclass(frozen=True)
class RngStream:
    """Stateless uniform source keyed by (seed, sub-stream, iteration, particle, variable)."""

    seed: int

    def _root(self, stream: SubStream, iteration: int) -> np.ndarray:
        h = _mix(_u64(self.seed & _MASK64) ^ _u64(int(stream)))
        return _fold(h, _u64(iteration))

    def uniform(
        self,
        stream: SubStream,
        iteration: int,
        particles,
        variables,
    ) -> np.ndarray:
        """Uniform [0, 1) deviates at the broadcast of particle/variable indices.

        ``particles`` and ``variables`` may be scalars or integer arrays;
        the result has their broadcast shape.  Calling twice with the
        same arguments returns identical bits.
        """
        h = _fold(self._root(stream, iteration), _u64(particles))
        h = _fold(h, _u64(variables))
        return (h >> 11).astype(np.float64) * _INV_2_53

    def matrix(self, stream: SubStream, iteration: int, row_lo: int, row_hi: int, nvar: int) -> np.ndarray:
        """Deviate block for particles ``row_lo..row_hi-1`` × all ``nvar`` coordinates."""
        i = np.arange(row_lo, row_hi, dtype=np.uint64)[:, None]
        j = np.arange(nvar, dtype=np.uint64)[None, :]
        return self.uniform(stream, iteration, i, j)
