"""Exit criteria. Each test records one PASS/FAIL line shown in the summary."""

import itertools
import json
import math
import random
import time
from collections import defaultdict

import numpy as np
import pytest

from crpstick import cli, laws, samplers
from crpstick.partition import bell_number, enumerate_partitions
from crpstick.rng import RandomSource
from crpstick.stats import (
    EmpiricalDistribution,
    chi_square_pvalue,
    chi_square_statistic,
    ks_statistic,
    tv_distance,
)

SEED = 2718281828
LEVEL = 1e-3


def test_c01_ewens_normalization(acceptance_line):
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 11):
        parts = enumerate_partitions(n)
        assert len(parts) == bell_number(n)
        for a in (0.3, 1.0, 2.0, 7.5):
            total = math.fsum(math.exp(laws.ewens_log_prob(p, a)) for p in parts)
            worst = max(worst, abs(total - 1.0))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 30
    acceptance_line("1 partition-law normalization", ok, f"max |sum-1|={worst:.2e}, {elapsed:.1f}s")
    assert ok


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_c02_crp_stick_equivalence(alpha, acceptance_line):
    t0 = time.perf_counter()
    n, N = 6, 10**6
    exact = laws.ewens_distribution(n, alpha)
    stream = int(alpha * 10)
    crp = EmpiricalDistribution.from_rows(samplers.crp_batch(n, alpha, N, RandomSource(SEED, stream)))
    stick = EmpiricalDistribution.from_rows(
        samplers.stick_breaking_partitions(n, alpha, N, RandomSource(SEED, stream + 100))
    )
    msgs = []
    ok = True
    for name, emp in (("crp", crp), ("stick", stick)):
        assert emp.total == N
        tv = tv_distance(emp, exact)
        stat, dof = chi_square_statistic(emp, exact)
        p = chi_square_pvalue(stat, dof)
        ok &= tv < 0.02 and p > LEVEL
        msgs.append(f"{name}: tv={tv:.4f} p={p:.3f}")
    between = tv_distance(stick, {k: v / N for k, v in crp.counts.items()})
    elapsed = time.perf_counter() - t0
    ok &= between < 0.02 and elapsed < 120
    acceptance_line(f"2 equivalence alpha={alpha}", ok, ", ".join(msgs) + f", crp-vs-stick tv={between:.4f}, {elapsed:.1f}s")
    assert ok


def test_c03_label_law(acceptance_line):
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        for n in range(1, 5):
            for z in itertools.product((1, 2, 3), repeat=n):
                worst = max(worst, abs(laws.lemma_a_log_prob(z, a) - laws.lemma_a_quadrature_oracle(z, a)))
    mass = laws.lemma_a_total_mass(3, 1.0, 200)
    monotone = bool(np.all(np.diff(mass) >= 0))
    ok = worst < 1e-7 and mass[-1] >= 0.999 and monotone
    acceptance_line("3 label law vs quadrature + mass", ok,
                    f"max log diff={worst:.2e}, mass(K=200)={mass[-1]:.12f}, monotone={monotone}")
    assert ok


def test_c04_partition_sum(acceptance_line):
    parts = enumerate_partitions(4)
    ok = True
    msgs = []
    for a in (0.5, 1.0, 2.0):
        sums = np.cumsum(laws.labeling_table(4, a, 40), axis=1)
        gap = 0.0
        monotone = True
        for i, c in enumerate(parts):
            seg = sums[i, c.num_blocks - 1 :]
            monotone &= bool(np.all(np.diff(seg) >= 0))
            gap = max(gap, abs(sums[i, -1] - laws.lemma_b_closed_form(c, a)))
        ok &= monotone and gap < 1e-4
        msgs.append(f"alpha={a}: gap(K=40)={gap:.1e}")
    # tightened bound: K=40 suffices for alpha <= 1; alpha=2 needs K=80
    tight = max(
        abs(t - laws.lemma_b_closed_form(c, 2.0))
        for c, t in zip(parts, laws.labeling_table(4, 2.0, 80).sum(axis=1))
    )
    ok &= tight < 1e-6
    msgs.append(f"alpha=2: gap(K=80)={tight:.1e}")
    acceptance_line("4 truncated partition sum", ok, ", ".join(msgs))
    assert ok


def test_c05_permutation_identity(acceptance_line):
    cases = [s for t in (1, 2, 3) for s in itertools.product(range(1, 6), repeat=t)]
    pick = random.Random(SEED)
    for _ in range(100):
        cases.append(tuple(pick.randint(1, 5) for _ in range(pick.randint(4, 6))))
    bad = []
    for s in cases:
        lhs, rhs = laws.lemma_c_check(s)
        if lhs != rhs:
            bad.append(s)
    ok = not bad
    acceptance_line("5 permutation-sum identity (exact)", ok, f"{len(cases)} cases, {len(bad)} mismatches")
    assert ok


def test_c06_recombination(acceptance_line):
    worst = 0.0
    for a in (0.3, 1.0, 2.0, 7.5):
        for n in range(1, 9):
            for p in enumerate_partitions(n):
                worst = max(worst, abs(laws.theorem1_recombination(p, a) - laws.ewens_log_prob(p, a)))
    ok = worst <= 1e-12
    acceptance_line("6 recombination", ok, f"max |diff|={worst:.2e}")
    assert ok


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_c07_polya_urn(alpha, acceptance_line):
    n = 12
    law = laws.polya_distribution(n, alpha)
    total = math.fsum(law.values())
    groups = defaultdict(set)
    for k in law:
        y = tuple(map(int, k.split("|")))
        groups[sum(y)].add(laws.polya_seq_log_prob(y, alpha))
    exch = all(len(v) == 1 for v in groups.values())
    emp = EmpiricalDistribution.from_rows(samplers.polya_batch(n, alpha, 10**6, RandomSource(SEED, 200 + int(alpha * 10))))
    stat, dof = chi_square_statistic(emp, law)
    p = chi_square_pvalue(stat, dof)
    ok = len(law) == 2**11 and abs(total - 1) <= 1e-10 and exch and p > LEVEL
    acceptance_line(f"7 urn alpha={alpha}", ok, f"|sum-1|={abs(total - 1):.1e}, exchangeable={exch}, chi2 p={p:.3f} (dof {dof})")
    assert ok


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_c08_beta_limit(alpha, acceptance_line):
    t0 = time.perf_counter()
    M = 10**4
    x = samplers.table1_proportions(10**4, alpha, M, RandomSource(SEED, 300 + int(alpha)))
    d = ks_statistic(x, alpha)
    elapsed = time.perf_counter() - t0
    ok = d < 1.95 / math.sqrt(M) and elapsed < 180
    acceptance_line(f"8 table-1 proportion alpha={alpha}", ok, f"KS={d:.4f} < {1.95 / math.sqrt(M):.4f}, {elapsed:.1f}s")
    assert ok


def test_c09_size_biased(acceptance_line):
    sizes = (2, 3, 5)
    law = laws.size_biased_distribution(sizes)
    total = math.fsum(law.values())
    emp = EmpiricalDistribution.from_rows(samplers.size_biased_batch(sizes, 10**6, RandomSource(SEED, 400)))
    stat, dof = chi_square_statistic(emp, law)
    p = chi_square_pvalue(stat, dof)
    ok = len(law) == 6 and abs(total - 1) <= 1e-12 and p > LEVEL
    acceptance_line("9 size-biased permutation", ok, f"|sum-1|={abs(total - 1):.1e}, chi2 p={p:.3f}")
    assert ok


def test_c10_reproducibility(tmp_path, acceptance_line):
    base = ["sample", "--process", "stick", "--alpha", "1.5", "--n", "5", "--seed", "99", "--quiet"]
    reps = str(2 * cli.BATCH_REPLICATES + 123)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(base + ["--replicates", reps, "--out", str(a)]) == 0
    assert cli.main(base + ["--replicates", reps, "--out", str(b)]) == 0
    identical = a.read_bytes() == b.read_bytes()

    merged = {}
    for workers in (1, 4):
        parts = []
        for stream in (7, 8):
            out = tmp_path / f"s{stream}_w{workers}.json"
            assert cli.main(base + ["--replicates", reps, "--stream", str(stream),
                                    "--workers", str(workers), "--out", str(out)]) == 0
            doc = json.loads(out.read_text())
            parts.append(EmpiricalDistribution(doc["counts"], doc["total"]))
        merged[workers] = parts[0] + parts[1]
    worker_free = merged[1] == merged[4]
    ok = identical and worker_free
    acceptance_line("10 reproducibility", ok, f"byte-identical={identical}, merged independent of workers={worker_free}")
    assert ok
