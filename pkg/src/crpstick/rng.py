"""Seeded random streams.

All randomness comes from numpy's counter-based Philox generator. The
128-bit key is ``seed | stream << 64``; batch ``b`` of a stream starts at
counter ``b << 128``, leaving 2**128 blocks between consecutive batches.
Changing this mapping changes every golden value in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

_U64 = 1 << 64
# smallest value substituted for an exact 0.0 so uniforms lie in (0, 1)
_TINY = 2.0**-60


def _check_u64(name: str, v: int) -> int:
    v = int(v)
    if not 0 <= v < _U64:
        raise InvalidInputError(f"{name} must be a 64-bit unsigned integer, got {v}")
    return v


@dataclass
class RandomSource:
    """A reproducible stream identified by ``(seed, stream)``."""

    seed: int
    stream: int = 0
    batch: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.seed = _check_u64("seed", self.seed)
        self.stream = _check_u64("stream", self.stream)
        self.batch = _check_u64("batch", self.batch)
        counter = [0, 0, self.batch, 0]
        bitgen = np.random.Philox(key=self.seed | (self.stream << 64), counter=counter)
        self.generator = np.random.Generator(bitgen)

    def for_batch(self, batch: int) -> RandomSource:
        return RandomSource(self.seed, self.stream, batch)

    def uniform_open(self, size=None):
        """Uniforms on the open interval (0, 1)."""
        u = self.generator.random(size)
        return np.where(u == 0.0, _TINY, u) if size is not None else (u or _TINY)

    def uniform_left_open(self, size=None):
        """Uniforms on (0, 1]."""
        return 1.0 - self.generator.random(size)


def as_source(rng) -> RandomSource:
    if isinstance(rng, RandomSource):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RandomSource(int(rng))
    raise InvalidInputError(f"expected RandomSource or integer seed, got {type(rng).__name__}")
