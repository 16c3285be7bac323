"""Closed-form log-probabilities and exact identity checks.

Everything that can overflow is evaluated on the log scale through
``math.lgamma``. The permutation-sum identity is checked in exact rational
arithmetic.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .errors import InvalidInputError, ResourceLimitError, UnsupportedSizeError
from .partition import (
    Partition,
    block_sizes,
    enumerate_partitions,
    induced_partition,
    partition_codes,
    validate_labeling,
)

MAX_PERMUTATION_T = 8
MAX_QUADRATURE_DIM = 3
MAX_LABELINGS = 10**8
DEFAULT_QUADRATURE_ORDER = 64


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise InvalidInputError(f"concentration must be positive and finite, got {alpha}")
    return alpha


def check_sizes(sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in sizes)
    if not sizes or min(sizes) < 1:
        raise InvalidInputError("sizes must be a nonempty sequence of positive integers")
    return sizes


def log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


# ---------------------------------------------------------------------------
# partition law


def ewens_log_prob(c: Partition, alpha: float) -> float:
    """log of alpha^|C| Gamma(alpha) / Gamma(n + alpha) * prod_c Gamma(|c|)."""
    alpha = check_alpha(alpha)
    sizes = block_sizes(c)
    return (
        len(sizes) * math.log(alpha)
        + math.lgamma(alpha)
        - math.lgamma(c.n + alpha)
        + sum(math.lgamma(s) for s in sizes)
    )


def ewens_distribution(n: int, alpha: float) -> dict[str, float]:
    """Exact partition law of [n], keyed by rgs text."""
    return {p.text(): math.exp(ewens_log_prob(p, alpha)) for p in enumerate_partitions(n)}


# ---------------------------------------------------------------------------
# joint law of stick-breaking labels


def level_counts(z: Sequence[int]) -> list[int]:
    """``g_k = #{i : z_i >= k}`` for ``k = 1..max(z)``."""
    z = validate_labeling(z)
    return [sum(1 for v in z if v >= k) for k in range(1, max(z) + 1)]


def lemma_a_log_prob(z: Sequence[int], alpha: float) -> float:
    """log P(z) for labels drawn iid from stick-breaking weights, integrated over the sticks."""
    alpha = check_alpha(alpha)
    z = validate_labeling(z)
    n = len(z)
    out = math.lgamma(alpha) - math.lgamma(n + alpha)
    out += sum(math.lgamma(s + 1) for s in block_sizes(induced_partition(z)))
    out += sum(math.log(alpha / (g + alpha)) for g in level_counts(z))
    return out


@lru_cache(maxsize=64)
def _gauss_legendre01(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _beta1_rule(alpha: float, order: int):
    """Nodes in v and weights for integrating f(v) against Beta(v | 1, alpha).

    For alpha < 1 the density blows up at v = 1. Substituting
    u = (1 - v)**alpha turns Beta(1, alpha) into Uniform(0, 1), so the
    Legendre rule runs on u and the density is never evaluated.
    """
    x, w = _gauss_legendre01(order)
    if alpha < 1.0:
        return 1.0 - x ** (1.0 / alpha), w
    return x, w * alpha * (1.0 - x) ** (alpha - 1.0)


def lemma_a_quadrature_oracle(
    z: Sequence[int], alpha: float, order: int = DEFAULT_QUADRATURE_ORDER
) -> float:
    """log P(z) by tensor-product quadrature over (v_1, ..., v_m), m = max(z) <= 3."""
    alpha = check_alpha(alpha)
    z = validate_labeling(z)
    m = max(z)
    if m > MAX_QUADRATURE_DIM:
        raise UnsupportedSizeError(f"max(z)={m} exceeds quadrature dimension {MAX_QUADRATURE_DIM}")
    e = [sum(1 for v in z if v == k) for k in range(1, m + 1)]
    f = [sum(1 for v in z if v > k) for k in range(1, m + 1)]
    nodes, weights = _beta1_rule(alpha, order)
    grids = np.meshgrid(*([nodes] * m), indexing="ij")
    wgrids = np.meshgrid(*([weights] * m), indexing="ij")
    integrand = np.ones_like(grids[0])
    for k in range(m):
        v = grids[k]
        integrand = integrand * v ** e[k] * (1.0 - v) ** f[k] * wgrids[k]
    return math.log(integrand.sum())


def labeling_table(n: int, alpha: float, K: int) -> np.ndarray:
    """Partial sums of prod_{k<=m} alpha/(g_k+alpha) over z in [K]^n.

    Row ``p`` follows ``enumerate_partitions(n)``; column ``m - 1`` collects
    labelings whose largest label is exactly ``m``.
    """
    alpha = check_alpha(alpha)
    if n < 1 or K < 1:
        raise InvalidInputError("n and K must be positive")
    if float(K) ** n > MAX_LABELINGS:
        raise ResourceLimitError(f"K^n = {K}^{n} exceeds {MAX_LABELINGS:.0e} labelings")
    return kernels.labeling_table(int(n), int(K), alpha, partition_codes(n))


def lemma_a_total_mass(n: int, alpha: float, K: int) -> np.ndarray:
    """``out[K' - 1]`` = sum over z in [K']^n of exp(lemma_a_log_prob), for K' = 1..K."""
    T = labeling_table(n, alpha, K)
    base = math.lgamma(alpha) - math.lgamma(n + alpha)
    scale = np.array(
        [math.exp(base + sum(math.lgamma(s + 1) for s in block_sizes(p))) for p in enumerate_partitions(n)]
    )
    return np.cumsum(scale @ T)


# ---------------------------------------------------------------------------
# the sum over labelings inducing a fixed partition


def lemma_b_closed_form(c: Partition, alpha: float) -> float:
    alpha = check_alpha(alpha)
    sizes = block_sizes(c)
    return alpha ** len(sizes) / math.prod(sizes)


def lemma_b_truncated_sums(c: Partition, alpha: float, K: int) -> np.ndarray:
    """``out[K' - 1]`` = truncated sum at bound K', for K' = 1..K."""
    T = labeling_table(c.n, alpha, K)
    p = int(np.searchsorted(partition_codes(c.n), _code(c)))
    return np.cumsum(T[p])


def lemma_b_truncated_sum(c: Partition, alpha: float, K: int) -> float:
    """Sum over z in {1..K}^n with C_z = C of prod_{k<=m(z)} alpha/(g_k(z)+alpha)."""
    return float(lemma_b_truncated_sums(c, alpha, K)[-1])


def _code(c: Partition) -> int:
    code = 0
    for r in c.rgs:
        code = code * c.n + r
    return code


# ---------------------------------------------------------------------------
# permutation-sum identity and size-biased permutations


def _tail_sums(sizes, sigma):
    out = []
    acc = 0
    for idx in reversed(sigma):
        acc += sizes[idx]
        out.append(acc)
    return out[::-1]


def lemma_c_check(sizes: Sequence[int]) -> tuple[Fraction, Fraction]:
    """(sum over permutations of 1/prod a_i(sigma), 1/prod n_i), both exact."""
    sizes = check_sizes(sizes)
    t = len(sizes)
    if t > MAX_PERMUTATION_T:
        raise UnsupportedSizeError(f"t={t} exceeds permutation bound {MAX_PERMUTATION_T}")
    lhs = Fraction(0)
    for sigma in itertools.permutations(range(t)):
        lhs += Fraction(1, math.prod(_tail_sums(sizes, sigma)))
    return lhs, Fraction(1, math.prod(sizes))


def check_permutation(sigma: Sequence[int], t: int) -> tuple[int, ...]:
    """Validate a 1-based permutation of [t]; returns it 0-based."""
    try:
        sigma = tuple(int(s) for s in sigma)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad permutation {sigma!r}") from exc
    if sorted(sigma) != list(range(1, t + 1)):
        raise InvalidInputError(f"{sigma} is not a permutation of 1..{t}")
    return tuple(s - 1 for s in sigma)


def size_biased_perm_log_prob(sizes: Sequence[int], sigma: Sequence[int]) -> float:
    """log of n_1...n_t / (a_1(sigma)...a_t(sigma)); ``sigma`` is 1-based."""
    sizes = check_sizes(sizes)
    s0 = check_permutation(sigma, len(sizes))
    return sum(math.log(s) for s in sizes) - sum(math.log(a) for a in _tail_sums(sizes, s0))


def size_biased_distribution(sizes: Sequence[int]) -> dict[str, float]:
    sizes = check_sizes(sizes)
    out = {}
    for sigma in itertools.permutations(range(1, len(sizes) + 1)):
        out["|".join(map(str, sigma))] = math.exp(size_biased_perm_log_prob(sizes, sigma))
    return out


# ---------------------------------------------------------------------------
# two-colour urn at table 1


def polya_seq_log_prob(y: Sequence[int], alpha: float) -> float:
    """log B(s, alpha + n - s) - log B(1, alpha) for a path starting with 1."""
    alpha = check_alpha(alpha)
    y = tuple(int(v) for v in y)
    if not y or y[0] != 1:
        raise InvalidInputError("path must be nonempty and start with 1")
    if any(v not in (0, 1) for v in y):
        raise InvalidInputError("path entries must be 0 or 1")
    n = len(y)
    if n == 1:
        return 0.0
    s = sum(y)
    return log_beta(s, alpha + n - s) - log_beta(1.0, alpha)


def polya_distribution(n: int, alpha: float) -> dict[str, float]:
    """Exact law over all 2^(n-1) paths, keyed by ``"1|0|1"``-style text."""
    out = {}
    for tail in itertools.product((0, 1), repeat=n - 1):
        y = (1,) + tail
        out["|".join(map(str, y))] = math.exp(polya_seq_log_prob(y, alpha))
    return out


# ---------------------------------------------------------------------------


def theorem1_recombination(c: Partition, alpha: float) -> float:
    """Partition log-probability assembled from the labeling law.

    Pulls the labeling-independent factor Gamma(alpha)/Gamma(n+alpha) *
    prod Gamma(|c|+1) out of the sum over compatible labelings and replaces
    that sum by its closed form; Gamma(|c|+1) = |c| Gamma(|c|) then cancels
    numerically rather than symbolically.
    """
    alpha = check_alpha(alpha)
    n = c.n
    out = math.lgamma(alpha) - math.lgamma(n + alpha)
    out += sum(math.lgamma(s + 1) for s in block_sizes(c))
    return out + math.log(lemma_b_closed_form(c, alpha))
