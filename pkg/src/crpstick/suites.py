"""Verification suites: each runs one family of checks and returns reports.

Sampling suites take a 64-bit ``seed`` and use stream ids 0, 1, 2, ... in
the order their runs are listed in the docstring.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict
from typing import Sequence

import numpy as np

from . import laws, samplers
from .partition import enumerate_partitions
from .rng import RandomSource
from .stats import (
    KS_CRITICAL_001,
    EmpiricalDistribution,
    TestReport,
    chi_square_critical,
    chi_square_pvalue,
    chi_square_statistic,
    ks_statistic,
    tv_distance,
)

TV_TOLERANCE = 0.02


def _chi2_report(suite, emp, exact, config):
    stat, dof = chi_square_statistic(emp, exact)
    return TestReport(
        suite,
        "chi_square",
        stat,
        chi_square_critical(dof),
        emp.total,
        config,
        {"dof": dof, "p_value": chi_square_pvalue(stat, dof), "tv": tv_distance(emp, exact)},
    )


def ewens_normalization(ns: Sequence[int] = range(1, 11), alphas=(0.3, 1.0, 2.0, 7.5), tol=1e-10):
    out = []
    for n in ns:
        parts = enumerate_partitions(n)
        for a in alphas:
            total = math.fsum(math.exp(laws.ewens_log_prob(p, a)) for p in parts)
            out.append(
                TestReport("ewens-normalization", "abs_total_minus_one", abs(total - 1.0), tol,
                           len(parts), {"n": n, "alpha": a})
            )
    return out


def lemma_a(alphas=(0.5, 1.0, 2.0), n_max=4, tol=1e-7, mass_n=3, mass_alpha=1.0, mass_K=200,
            mass_floor=0.999):
    """Closed form vs quadrature for every z with n <= n_max and max(z) <= 3,
    then the total mass over [K]^n as K grows."""
    out = []
    for a in alphas:
        worst = 0.0
        count = 0
        for n in range(1, n_max + 1):
            for z in itertools.product((1, 2, 3), repeat=n):
                diff = abs(laws.lemma_a_log_prob(z, a) - laws.lemma_a_quadrature_oracle(z, a))
                worst = max(worst, diff)
                count += 1
        out.append(TestReport("lemma-a", "max_abs_log_diff_vs_quadrature", worst, tol, count,
                              {"alpha": a, "n_max": n_max}))
    mass = laws.lemma_a_total_mass(mass_n, mass_alpha, mass_K)
    cfg = {"alpha": mass_alpha, "n": mass_n, "K": mass_K}
    out.append(TestReport("lemma-a", "one_minus_total_mass", 1.0 - mass[-1], 1.0 - mass_floor,
                          mass_K**mass_n, cfg, {"total_mass": float(mass[-1])}))
    out.append(TestReport("lemma-a", "max_decrease_in_K", _max_decrease(mass), 0.0,
                          mass_K**mass_n, cfg))
    return out


def _max_decrease(seq) -> float:
    seq = np.asarray(seq)
    return float(max(0.0, np.max(seq[:-1] - seq[1:]))) if seq.size > 1 else 0.0


def lemma_b(n=4, alphas=(0.5, 1.0, 2.0), K=40, tol=1e-4):
    """Truncated sums over [K]^n against the closed form, for every partition of [n]."""
    out = []
    parts = enumerate_partitions(n)
    for a in alphas:
        T = np.cumsum(laws.labeling_table(n, a, K), axis=1)
        gap = 0.0
        dec = 0.0
        for i, p in enumerate(parts):
            gap = max(gap, abs(T[i, -1] - laws.lemma_b_closed_form(p, a)))
            dec = max(dec, _max_decrease(T[i, p.num_blocks - 1 :]))
        cfg = {"alpha": a, "n": n, "K": K}
        out.append(TestReport("lemma-b", "max_abs_gap_to_closed_form", gap, tol, len(parts), cfg))
        out.append(TestReport("lemma-b", "max_decrease_in_K", dec, 0.0, len(parts), cfg))
    return out


def lemma_c(max_t=6, max_entry=5, exhaustive_t=3, random_cases=100, seed=0):
    """Exact identity over all size vectors with t <= exhaustive_t, then
    ``random_cases`` vectors with t in (exhaustive_t, max_t]."""
    cases = [
        s for t in range(1, min(exhaustive_t, max_t) + 1)
        for s in itertools.product(range(1, max_entry + 1), repeat=t)
    ]
    if max_t > exhaustive_t:
        pick = random.Random(seed)
        for _ in range(random_cases):
            t = pick.randint(exhaustive_t + 1, max_t)
            cases.append(tuple(pick.randint(1, max_entry) for _ in range(t)))
    bad = []
    for s in cases:
        lhs, rhs = laws.lemma_c_check(s)
        if lhs != rhs:
            bad.append(s)
    return [TestReport("lemma-c", "mismatches", len(bad), 0, len(cases),
                       {"max_t": max_t, "max_entry": max_entry, "seed": seed},
                       {"failing": [list(s) for s in bad[:10]]})]


def recombination(n_max=8, alphas=(0.3, 1.0, 2.0, 7.5), tol=1e-12):
    out = []
    for a in alphas:
        worst = 0.0
        count = 0
        for n in range(1, n_max + 1):
            for p in enumerate_partitions(n):
                worst = max(worst, abs(laws.theorem1_recombination(p, a) - laws.ewens_log_prob(p, a)))
                count += 1
        out.append(TestReport("recombination", "max_abs_log_diff", worst, tol, count,
                              {"alpha": a, "n_max": n_max}))
    return out


def polya(n=12, alphas=(0.5, 1.0), replicates=10**6, seed=0, tol=1e-10):
    """Stream k samples the paths for ``alphas[k]``."""
    out = []
    for k, a in enumerate(alphas):
        cfg = {"alpha": a, "n": n, "replicates": replicates, "seed": seed, "stream": k}
        exact = laws.polya_distribution(n, a)
        out.append(TestReport("polya", "abs_total_minus_one", abs(math.fsum(exact.values()) - 1.0),
                              tol, len(exact), cfg))
        groups = defaultdict(list)
        for key in exact:
            y = tuple(map(int, key.split("|")))
            groups[sum(y)].append(laws.polya_seq_log_prob(y, a))
        spread = max(max(v) - min(v) for v in groups.values())
        out.append(TestReport("polya", "max_logprob_spread_within_success_count", spread, 0.0,
                              len(exact), cfg))
        rows = samplers.polya_batch(n, a, replicates, RandomSource(seed, k))
        out.append(_chi2_report("polya", EmpiricalDistribution.from_rows(rows), exact, cfg))
    return out


def equivalence(n=6, alpha=1.0, replicates=10**6, seed=0, tol=TV_TOLERANCE):
    """Stream 0 drives the CRP, stream 1 the stick-breaking labels."""
    exact = laws.ewens_distribution(n, alpha)
    cfg = {"alpha": alpha, "n": n, "replicates": replicates, "seed": seed}
    emp = {
        "crp": EmpiricalDistribution.from_rows(samplers.crp_batch(n, alpha, replicates, RandomSource(seed, 0))),
        "stick": EmpiricalDistribution.from_rows(
            samplers.stick_breaking_partitions(n, alpha, replicates, RandomSource(seed, 1))
        ),
    }
    out = []
    for name, e in emp.items():
        c = dict(cfg, process=name)
        out.append(TestReport("equivalence", "tv_to_exact", tv_distance(e, exact), tol, e.total, c))
        out.append(_chi2_report("equivalence", e, exact, c))
    crp_freq = {k: v / emp["crp"].total for k, v in emp["crp"].counts.items()}
    between = tv_distance(emp["stick"], crp_freq)
    out.append(TestReport("equivalence", "tv_crp_vs_stick", between, tol, replicates, dict(cfg, process="both")))
    return out


def beta_limit(n=10**4, alphas=(1.0, 2.0), replicates=10**4, seed=0):
    """Stream k drives the urn paths for ``alphas[k]``."""
    out = []
    for k, a in enumerate(alphas):
        x = samplers.table1_proportions(n, a, replicates, RandomSource(seed, k))
        out.append(TestReport("beta-limit", "ks", ks_statistic(x, a), KS_CRITICAL_001 / math.sqrt(replicates),
                              replicates, {"alpha": a, "n": n, "replicates": replicates, "seed": seed, "stream": k}))
    return out


def size_biased(sizes=(2, 3, 5), replicates=10**6, seed=0, tol=1e-12):
    exact = laws.size_biased_distribution(sizes)
    cfg = {"sizes": list(sizes), "n": len(sizes), "replicates": replicates, "seed": seed}
    out = [TestReport("size-biased", "abs_total_minus_one", abs(math.fsum(exact.values()) - 1.0), tol,
                      len(exact), cfg)]
    rows = samplers.size_biased_batch(sizes, replicates, RandomSource(seed, 0))
    out.append(_chi2_report("size-biased", EmpiricalDistribution.from_rows(rows), exact, cfg))
    return out


SUITES = {
    "ewens-normalization": ewens_normalization,
    "lemma-a": lemma_a,
    "lemma-b": lemma_b,
    "lemma-c": lemma_c,
    "polya": polya,
    "recombination": recombination,
    "equivalence": equivalence,
    "beta-limit": beta_limit,
    "size-biased": size_biased,
}
