"""Set partitions of [n] in restricted-growth-string form."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidInputError, UnsupportedSizeError

MAX_ENUMERATION_N = 12


@dataclass(frozen=True)
class Partition:
    """A set partition of ``{1, ..., n}`` stored as a restricted-growth string.

    ``rgs[i]`` is the block index of element ``i + 1``; blocks are numbered by
    first appearance, so two partitions are equal exactly when their strings
    are equal.
    """

    rgs: tuple[int, ...]

    def __post_init__(self):
        rgs = tuple(int(r) for r in self.rgs)
        if not rgs:
            raise InvalidInputError("partition of an empty set")
        top = -1
        for r in rgs:
            if r < 0 or r > top + 1:
                raise InvalidInputError(f"not a restricted-growth string: {rgs}")
            top = max(top, r)
        object.__setattr__(self, "rgs", rgs)

    @property
    def n(self) -> int:
        return len(self.rgs)

    @property
    def num_blocks(self) -> int:
        return max(self.rgs) + 1

    def blocks(self) -> list[frozenset[int]]:
        """Blocks as sets of 1-based elements, ordered by first appearance."""
        out: list[set[int]] = [set() for _ in range(self.num_blocks)]
        for i, r in enumerate(self.rgs, start=1):
            out[r].add(i)
        return [frozenset(b) for b in out]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> Partition:
        blocks = [sorted(b) for b in blocks]
        elems = sorted(e for b in blocks for e in b)
        n = len(elems)
        if n == 0 or elems != list(range(1, n + 1)) or any(not b for b in blocks):
            raise InvalidInputError("blocks must be nonempty and cover 1..n exactly once")
        z = [0] * n
        for label, b in enumerate(blocks, start=1):
            for e in b:
                z[e - 1] = label
        return induced_partition(z)

    def text(self) -> str:
        return "|".join(map(str, self.rgs))

    @classmethod
    def from_text(cls, s: str) -> Partition:
        try:
            return cls(tuple(int(x) for x in s.split("|")))
        except ValueError as exc:
            raise InvalidInputError(f"bad partition text {s!r}") from exc

    def to_json(self) -> dict:
        return {"n": self.n, "rgs": list(self.rgs)}

    @classmethod
    def from_json(cls, obj: dict | str) -> Partition:
        if isinstance(obj, str):
            obj = json.loads(obj)
        p = cls(tuple(obj["rgs"]))
        if p.n != obj["n"]:
            raise InvalidInputError("n does not match rgs length")
        return p

    def __str__(self) -> str:
        return self.text()


def validate_labeling(z: Sequence[int]) -> tuple[int, ...]:
    z = tuple(int(v) for v in z)
    if not z:
        raise InvalidInputError("labeling must be nonempty")
    if min(z) < 1:
        raise InvalidInputError("labels must be positive integers")
    return z


def induced_partition(z: Sequence[int]) -> Partition:
    """Partition in which ``i`` and ``j`` share a block iff ``z[i] == z[j]``.

    Accepts any hashable labels; the spec'd domain is positive integers.
    """
    if len(z) == 0:
        raise InvalidInputError("labeling must be nonempty")
    seen: dict = {}
    rgs = []
    for v in z:
        if v not in seen:
            seen[v] = len(seen)
        rgs.append(seen[v])
    return Partition(tuple(rgs))


def block_sizes(c: Partition) -> list[int]:
    """Block sizes in order of first appearance."""
    counts = Counter(c.rgs)
    return [counts[b] for b in range(c.num_blocks)]


def _rgs_lex(n: int) -> Iterator[tuple[int, ...]]:
    rgs = [0] * n
    # prefix maxima: top[i] = max(rgs[:i + 1])
    top = [0] * n
    while True:
        yield tuple(rgs)
        i = n - 1
        while i > 0 and rgs[i] > top[i - 1]:
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        top[i] = max(top[i - 1], rgs[i])
        for j in range(i + 1, n):
            rgs[j] = 0
            top[j] = top[i]


def enumerate_partitions(n: int) -> list[Partition]:
    """All set partitions of [n] in lexicographic order of their rgs."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n!r}")
    if n > MAX_ENUMERATION_N:
        raise UnsupportedSizeError(f"n={n} exceeds enumeration cap {MAX_ENUMERATION_N}")
    return [Partition(r) for r in _rgs_lex(int(n))]


def bell_number(n: int) -> int:
    """Bell number via the Bell triangle."""
    if n < 0:
        raise InvalidInputError("n must be non-negative")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def rgs_code(rgs: Sequence[int], n: int | None = None) -> int:
    """Base-``n`` integer with ``rgs[0]`` most significant; monotone in lex order."""
    n = len(rgs) if n is None else n
    code = 0
    for r in rgs:
        code = code * n + int(r)
    return code


def partition_codes(n: int) -> np.ndarray:
    """Sorted ``rgs_code`` of every partition of [n], aligned with enumerate_partitions."""
    return np.array([rgs_code(p.rgs, n) for p in enumerate_partitions(n)], dtype=np.int64)
