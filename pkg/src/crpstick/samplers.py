"""Seeded Monte Carlo generators for the CRP, stick-breaking labels, the
table-1 urn and size-biased permutations.

Batch samplers draw their uniforms in fixed-size row chunks and hand them to
:mod:`crpstick.kernels`, so the output depends only on the inputs and the
:class:`~crpstick.rng.RandomSource`, never on the backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import InvalidInputError
from .laws import check_alpha, check_sizes
from .partition import Partition
from .rng import RandomSource, as_source

# target number of uniforms per chunk; part of the reproducibility contract
CHUNK_ELEMS = 1 << 22
# chance that a stick-breaking replicate outgrows its pre-drawn pool
POOL_OVERFLOW = 1e-4
MAX_POOL = 4096


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _chunks(total: int, width: int):
    rows = max(1, CHUNK_ELEMS // max(1, width))
    start = 0
    while start < total:
        stop = min(total, start + rows)
        yield start, stop
        start = stop


def stick_weights(v: Sequence[float]) -> tuple[np.ndarray, float]:
    """pi_k = v_k * prod_{i<k} (1 - v_i), together with the leftover mass."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or np.any((v < 0) | (v > 1)) or np.any(np.isnan(v)):
        raise InvalidInputError("stick proportions must lie in [0, 1]")
    pi = np.empty_like(v)
    residual = 1.0
    for k, vk in enumerate(v):
        pi[k] = vk * residual
        residual *= 1.0 - vk
    return pi, residual


def beta1_from_uniform(u, alpha: float):
    """Inverse-CDF draw from Beta(1, alpha)."""
    return 1.0 - u ** (1.0 / alpha)


@dataclass
class StickSequence:
    """Stick-breaking weights realized on demand."""

    alpha: float
    realized_v: list[float] = field(default_factory=list)
    realized_pi: list[float] = field(default_factory=list)
    residual: float = 1.0
    # residual after each realized stick
    _tails: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.alpha = check_alpha(self.alpha)
        v = list(self.realized_v)
        self.realized_v, self.realized_pi, self.residual, self._tails = [], [], 1.0, []
        for vk in v:
            self.append(vk)

    def append(self, v: float) -> None:
        if not 0.0 <= v <= 1.0:
            raise InvalidInputError(f"stick proportion {v} outside [0, 1]")
        self.realized_v.append(float(v))
        self.realized_pi.append(v * self.residual)
        self.residual *= 1.0 - v
        self._tails.append(self.residual)

    def extend(self, rng: RandomSource) -> float:
        v = beta1_from_uniform(rng.uniform_open(), self.alpha)
        self.append(v)
        return v

    def label_for(self, w: float, rng: RandomSource) -> int:
        """1-based label of a draw with (0, 1]-uniform ``w``; extends as needed.

        Label k is chosen iff residual_k < w <= residual_{k-1}, which has
        probability pi_k.
        """
        for k, tail in enumerate(self._tails):
            if tail < w:
                return k + 1
        while True:
            self.extend(rng)
            if self._tails[-1] < w:
                return len(self._tails)


def stick_pool_size(n: int, alpha: float) -> int:
    """Sticks pre-drawn per replicate; overflow is handled exactly, this only
    keeps it rare."""
    r = alpha / (1.0 + alpha)
    if r <= 0.0:
        return 1
    need = math.log(POOL_OVERFLOW / n) / math.log(r)
    return int(min(MAX_POOL, max(1, math.ceil(need))))


def stick_breaking_batch(n: int, alpha: float, replicates: int, rng) -> np.ndarray:
    """``replicates`` x ``n`` labels (values in 1, 2, ...) from lazy stick-breaking."""
    n = _check_n(n)
    alpha = check_alpha(alpha)
    R = _check_n(replicates)
    src = as_source(rng)
    L = stick_pool_size(n, alpha)
    out = np.empty((R, n), dtype=np.int64)
    for a, b in _chunks(R, n * L):
        w = src.uniform_left_open((b - a, n))
        v = beta1_from_uniform(src.uniform_open((b - a, L)), alpha)
        lab = kernels.stick_labels(w, v)
        for r in np.flatnonzero((lab == 0).any(axis=1)):
            seq = StickSequence(alpha, list(v[r]))
            for i in np.flatnonzero(lab[r] == 0):
                lab[r, i] = seq.label_for(w[r, i], src)
        out[a:b] = lab
    return out


def stick_breaking_labels(n: int, alpha: float, rng) -> tuple[int, ...]:
    return tuple(int(x) for x in stick_breaking_batch(n, alpha, 1, rng)[0])


def stick_breaking_partitions(n: int, alpha: float, replicates: int, rng) -> np.ndarray:
    """Canonical rgs rows of the partitions induced by stick-breaking labels."""
    return kernels.rgs_rows(stick_breaking_batch(n, alpha, replicates, rng))


def crp_batch(n: int, alpha: float, replicates: int, rng) -> np.ndarray:
    """``replicates`` x ``n`` table assignments; rows are already canonical rgs."""
    n = _check_n(n)
    alpha = check_alpha(alpha)
    R = _check_n(replicates)
    src = as_source(rng)
    out = np.zeros((R, n), dtype=np.int64)
    if n == 1:
        return out
    for a, b in _chunks(R, n - 1):
        out[a:b] = kernels.crp_tables(src.generator.random((b - a, n - 1)), alpha)
    return out


def crp_sample(n: int, alpha: float, rng) -> Partition:
    return Partition(tuple(crp_batch(n, alpha, 1, rng)[0]))


def polya_batch(n: int, alpha: float, replicates: int, rng) -> np.ndarray:
    n = _check_n(n)
    alpha = check_alpha(alpha)
    R = _check_n(replicates)
    src = as_source(rng)
    out = np.ones((R, n), dtype=np.uint8)
    if n == 1:
        return out
    for a, b in _chunks(R, n - 1):
        out[a:b] = kernels.polya_paths(src.generator.random((b - a, n - 1)), alpha)
    return out


def polya_urn_path(n: int, alpha: float, rng) -> tuple[int, ...]:
    return tuple(int(y) for y in polya_batch(n, alpha, 1, rng)[0])


def table1_proportions(n: int, alpha: float, replicates: int, rng) -> np.ndarray:
    """s_n / n for independent urn paths of length ``n``."""
    n = _check_n(n)
    alpha = check_alpha(alpha)
    R = _check_n(replicates)
    src = as_source(rng)
    out = np.ones(R, dtype=np.float64)
    if n == 1:
        return out
    for a, b in _chunks(R, n - 1):
        s = kernels.polya_successes(src.generator.random((b - a, n - 1)), alpha)
        out[a:b] = s / n
    return out


def table1_proportion(n: int, alpha: float, rng) -> float:
    return float(table1_proportions(n, alpha, 1, rng)[0])


def size_biased_batch(sizes: Sequence[int], replicates: int, rng) -> np.ndarray:
    """Rows are 1-based permutations: ball drawn first, second, ..."""
    sizes = np.array(check_sizes(sizes), dtype=np.int64)
    R = _check_n(replicates)
    src = as_source(rng)
    t = sizes.shape[0]
    out = np.ones((R, t), dtype=np.int64)
    if t == 1:
        return out
    for a, b in _chunks(R, t - 1):
        out[a:b] = kernels.size_biased_perms(src.generator.random((b - a, t - 1)), sizes) + 1
    return out


def size_biased_permutation(sizes: Sequence[int], rng) -> tuple[int, ...]:
    return tuple(int(s) for s in size_biased_batch(sizes, 1, rng)[0])
