"""Empirical distributions and goodness-of-fit statistics."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import stats as _sps

from .errors import InvalidInputError
from .partition import Partition

CHI2_MIN_EXPECTED = 5.0
TEST_LEVEL = 1e-3
# level-0.001 asymptotic Kolmogorov critical value, scaled by 1/sqrt(M)
KS_CRITICAL_001 = 1.95


def _key(k) -> str:
    return k.text() if isinstance(k, Partition) else str(k)


def _key_n(k: str) -> int:
    return k.count("|") + 1


@dataclass
class EmpiricalDistribution:
    """Sample counts keyed by ``"0|1|0"``-style text."""

    counts: dict[str, int] = field(default_factory=dict)
    total: int = 0

    def __post_init__(self):
        self.counts = {_key(k): int(v) for k, v in self.counts.items() if v}
        if any(v < 0 for v in self.counts.values()):
            raise InvalidInputError("counts must be non-negative")
        s = sum(self.counts.values())
        if self.total == 0:
            self.total = s
        if s != self.total:
            raise InvalidInputError(f"counts sum to {s}, total says {self.total}")
        if len({_key_n(k) for k in self.counts}) > 1:
            raise InvalidInputError("keys of differing length")

    @property
    def n(self) -> int | None:
        return _key_n(next(iter(self.counts))) if self.counts else None

    def merge(self, other: EmpiricalDistribution) -> EmpiricalDistribution:
        merged = Counter(self.counts)
        merged.update(other.counts)
        return EmpiricalDistribution(dict(merged), self.total + other.total)

    __add__ = merge

    def freq(self, key) -> float:
        return self.counts.get(_key(key), 0) / self.total if self.total else 0.0

    @classmethod
    def from_rows(cls, rows: np.ndarray) -> EmpiricalDistribution:
        """Count identical rows of an integer array, one sample per row."""
        rows = np.asarray(rows)
        if rows.ndim != 2:
            raise InvalidInputError("expected a 2-D array of samples")
        if rows.shape[0] == 0:
            return cls()
        uniq, cnt = np.unique(rows, axis=0, return_counts=True)
        counts = {"|".join(map(str, r)): int(c) for r, c in zip(uniq.tolist(), cnt)}
        return cls(dict(sorted(counts.items())), int(rows.shape[0]))

    def to_json(self) -> dict:
        return {"counts": dict(sorted(self.counts.items())), "total": self.total}


def accumulate(samples: Iterable) -> EmpiricalDistribution:
    """Count a stream of partitions (or any objects with a text key)."""
    counts: Counter = Counter()
    n = None
    for s in samples:
        k = _key(s)
        kn = _key_n(k)
        if n is None:
            n = kn
        elif kn != n:
            raise InvalidInputError(f"mixed sizes in sample stream: {n} and {kn}")
        counts[k] += 1
    return EmpiricalDistribution(dict(counts))


def _normalized(exact: Mapping, tol: float = 1e-9) -> dict[str, float]:
    exact = {_key(k): float(v) for k, v in exact.items()}
    s = sum(exact.values())
    if any(v < 0 for v in exact.values()) or abs(s - 1.0) > tol:
        raise InvalidInputError(f"reference probabilities sum to {s!r}, not 1")
    return exact


def tv_distance(emp: EmpiricalDistribution | Mapping, exact: Mapping) -> float:
    """Half the L1 distance between sample frequencies and a reference law."""
    exact = _normalized(exact)
    if isinstance(emp, EmpiricalDistribution):
        if emp.total == 0:
            raise InvalidInputError("empty empirical distribution")
        p = {k: c / emp.total for k, c in emp.counts.items()}
    else:
        p = _normalized(emp)
    keys = set(p) | set(exact)
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - exact.get(k, 0.0)) for k in keys)


def chi_square_statistic(emp: EmpiricalDistribution, exact: Mapping) -> tuple[float, int]:
    """Pearson statistic with cells of expected count below 5 pooled into one."""
    if emp.total == 0:
        raise InvalidInputError("empty empirical distribution")
    exact = _normalized(exact)
    stat = 0.0
    cells = 0
    pool_obs = 0
    pool_exp = 0.0
    for k in set(exact) | set(emp.counts):
        obs = emp.counts.get(k, 0)
        expct = emp.total * exact.get(k, 0.0)
        if expct >= CHI2_MIN_EXPECTED:
            stat += (obs - expct) ** 2 / expct
            cells += 1
        else:
            pool_obs += obs
            pool_exp += expct
    if pool_obs or pool_exp:
        stat += (pool_obs - pool_exp) ** 2 / pool_exp if pool_exp > 0 else math.inf
        cells += 1
    return stat, max(cells - 1, 0)


def chi_square_critical(dof: int, level: float = TEST_LEVEL) -> float:
    return float(_sps.chi2.isf(level, dof)) if dof > 0 else 0.0


def chi_square_pvalue(stat: float, dof: int) -> float:
    return float(_sps.chi2.sf(stat, dof)) if dof > 0 else 1.0


def beta1_cdf(x, alpha: float):
    x = np.clip(x, 0.0, 1.0)
    return 1.0 - (1.0 - x) ** alpha


def ks_statistic(samples, alpha: float) -> float:
    """sup_x |ECDF(x) - (1 - (1 - x)^alpha)|."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if x.size == 0:
        raise InvalidInputError("no samples")
    M = x.size
    F = beta1_cdf(x, alpha)
    upper = np.arange(1, M + 1) / M - F
    lower = F - np.arange(0, M) / M
    return float(max(upper.max(), lower.max()))


@dataclass
class TestReport:
    """One statistic compared against its threshold; ``passed`` iff value <= threshold."""

    suite: str
    statistic: str
    value: float
    threshold: float
    sample_size: int
    config: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    passed: bool = field(init=False)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        self.value = float(self.value)
        self.threshold = float(self.threshold)
        self.passed = bool(self.value <= self.threshold)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> TestReport:
        try:
            rep = cls(
                suite=str(d["suite"]),
                statistic=str(d["statistic"]),
                value=float(d["value"]),
                threshold=float(d["threshold"]),
                sample_size=int(d["sample_size"]),
                config=dict(d.get("config", {})),
                details=dict(d.get("details", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed report: {exc}") from exc
        if "passed" in d and bool(d["passed"]) != rep.passed:
            raise InvalidInputError("pass flag inconsistent with value and threshold")
        return rep

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
