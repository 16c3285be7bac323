import pytest

from crpstick import suites

SMALL = {
    "ewens-normalization": dict(ns=[1, 4, 7]),
    "lemma-a": dict(alphas=(1.0,), n_max=3, mass_K=60),
    "lemma-b": dict(n=3, K=30, alphas=(1.0,)),
    "lemma-c": dict(max_t=5, random_cases=10),
    "polya": dict(n=6, replicates=100_000, seed=4),
    "recombination": dict(n_max=6),
    "equivalence": dict(n=4, replicates=200_000, seed=4),
    "beta-limit": dict(n=2000, replicates=2000, seed=4),
    "size-biased": dict(replicates=100_000, seed=4),
}


def test_every_suite_has_small_params():
    assert set(SMALL) == set(suites.SUITES)


@pytest.mark.parametrize("name", sorted(suites.SUITES))
def test_suite_runs_and_passes(name):
    reports = suites.SUITES[name](**SMALL[name])
    assert reports
    for r in reports:
        assert r.suite == name
        assert r.passed, r


def test_chi_square_reports_carry_tv():
    (chi,) = [r for r in suites.size_biased(replicates=50_000, seed=1) if r.statistic == "chi_square"]
    assert set(chi.details) == {"dof", "p_value", "tv"}
