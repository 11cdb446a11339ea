"""Seedable inverse-transform sampling.

A draw is ``floor(F^{-1}(U))`` where ``F`` is the continuous TSP parent with
the same parameters and ``U ~ Uniform[0, 1)``. Since
``P(floor(X) = y) = S_X(y) - S_X(y+1)`` this reproduces the discrete pmf
exactly for every shape.

Streams
-------
An :class:`RngState` is identified by ``(seed, stream)``, both unsigned 64-bit
integers. It drives numpy's PCG64 seeded through
``SeedSequence(seed, spawn_key=(stream,))``, which is platform independent.
Independent replicates get stream ids from :func:`substream_id`, a SplitMix64
fold over the replicate coordinates::

    h = 0
    for i in indices:
        h = splitmix64(h ^ i)

so results do not depend on the order in which replicates are executed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .core import DtspParams
from .errors import DomainError
from .tsp import tsp_quantile

__all__ = [
    "RngState",
    "Sample",
    "Provenance",
    "splitmix64",
    "substream_id",
    "variate_from_uniform",
    "sample_one",
    "sample_many",
]

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def substream_id(*indices: int) -> int:
    h = 0
    for i in indices:
        h = splitmix64(h ^ (int(i) & _MASK64))
    return h


def _check_u64(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if not 0 <= int(value) <= _MASK64:
        raise DomainError(f"{name}={value} outside the unsigned 64-bit range")
    return int(value)


class RngState:
    """Uniform deviate source owned by one execution context at a time."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = _check_u64("seed", seed)
        self.stream = _check_u64("stream", stream)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def uniform(self) -> float:
        """One deviate in [0, 1) with 53 bits of resolution."""
        return float(self._gen.random())

    def uniforms(self, count: int) -> np.ndarray:
        return self._gen.random(count)

    def __repr__(self):
        return f"RngState(seed={self.seed}, stream={self.stream})"


@dataclass(frozen=True)
class Provenance:
    params: DtspParams
    seed: int
    stream: int


@dataclass(eq=False)
class Sample:
    values: np.ndarray
    provenance: Optional[Provenance] = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64).reshape(-1)

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return (int(v) for v in self.values)

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return self.provenance == other.provenance and np.array_equal(self.values, other.values)

    def frequencies(self, p: DtspParams) -> np.ndarray:
        """Relative frequency of each support point ``a..b-1``."""
        counts = np.bincount(self.values - p.a, minlength=p.width)
        return counts / self.values.size


def variate_from_uniform(p: DtspParams, u: float) -> int:
    """Steps III-IV of the generator for a given deviate ``u``."""
    x = tsp_quantile(p.continuous(), u)
    y = math.floor(x)
    # floating-point rounding at u -> 1 can land exactly on b
    return min(max(y, p.a), p.b - 1)


def sample_one(p: DtspParams, rng: RngState, u: Optional[float] = None) -> int:
    """Draw one variate. ``u`` forces the deviate (testing hook)."""
    if u is None:
        u = rng.uniform()
    return variate_from_uniform(p, u)


def sample_many(p: DtspParams, count: int, rng: RngState) -> Sample:
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    us = rng.uniforms(int(count))
    values = kernels.floor_quantile(us, p.a, p.m, p.b, p.n)
    return Sample(values, Provenance(p, rng.seed, rng.stream))
