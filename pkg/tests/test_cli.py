import csv
import io
import json

import pytest

from crpstick import cli
from crpstick.partition import bell_number
from crpstick.stats import EmpiricalDistribution


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_sample_crp_json(tmp_path):
    out = tmp_path / "crp.json"
    assert run("sample", "--process", "crp", "--alpha", 1, "--n", 6, "--replicates", 300_000,
               "--seed", 42, "--out", out, "--quiet") == 0
    doc = json.loads(out.read_text())
    assert len(doc["counts"]) == bell_number(6)
    assert sum(doc["counts"].values()) == doc["total"] == 300_000
    assert doc["config"]["seed"] == 42 and doc["config"]["process"] == "crp"
    assert doc["version"]


def test_sample_stick_singletons(tmp_path):
    out = tmp_path / "s.json"
    assert run("sample", "--process", "stick", "--alpha", 1, "--n", 1, "--replicates", 100,
               "--seed", 7, "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["counts"] == {"0": 100}


def test_sample_raw_draws(tmp_path):
    out = tmp_path / "r.json"
    assert run("sample", "--process", "stick", "--alpha", 2, "--n", 4, "--replicates", 10,
               "--seed", 1, "--raw", "--out", out) == 0
    doc = json.loads(out.read_text())
    assert len(doc["draws"]) == 10 and all(min(z) >= 1 for z in doc["draws"])


@pytest.mark.parametrize("process, extra", [("crp", ["--n", 5]), ("stick", ["--n", 5]), ("polya", ["--n", 8]),
                                            ("size-biased", ["--sizes", 2, 3, 5])])
def test_sample_byte_identical(tmp_path, process, extra):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        args = ["sample", "--process", process, "--alpha", 0.8, *extra, "--replicates", 5000,
                "--seed", 11, "--out", p]
        assert run(*args) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sample_independent_of_workers(tmp_path):
    paths = {}
    for w in (1, 3):
        p = tmp_path / f"w{w}.json"
        assert run("sample", "--process", "crp", "--alpha", 1.5, "--n", 4,
                   "--replicates", 3 * cli.BATCH_REPLICATES + 17, "--seed", 5, "--workers", w,
                   "--out", p, "--quiet") == 0
        paths[w] = p
    assert paths[1].read_bytes() == paths[3].read_bytes()


def test_merge_of_streams(tmp_path):
    docs = []
    for stream in (0, 1):
        p = tmp_path / f"s{stream}.json"
        assert run("sample", "--process", "crp", "--n", 4, "--replicates", 2000, "--seed", 5,
                   "--stream", stream, "--out", p) == 0
        docs.append(json.loads(p.read_text()))
    assert docs[0]["counts"] != docs[1]["counts"]
    a, b = (EmpiricalDistribution(d["counts"], d["total"]) for d in docs)
    assert (a + b) == (b + a) and (a + b).total == 4000


def test_sample_csv(tmp_path):
    out = tmp_path / "c.csv"
    assert run("sample", "--process", "polya", "--n", 3, "--alpha", 1, "--replicates", 100,
               "--seed", 2, "--format", "csv", "--out", out) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["key", "count"]
    assert sum(int(r[1]) for r in rows[1:]) == 100


def test_sample_errors(tmp_path, capsys):
    assert run("sample", "--process", "crp", "--alpha", -1, "--n", 3, "--replicates", 5, "--seed", 1) == 1
    assert run("sample", "--process", "crp", "--replicates", 5, "--seed", 1) == 1
    assert run("sample", "--process", "size-biased", "--replicates", 5, "--seed", 1) == 1
    with pytest.raises(SystemExit) as exc:
        run("sample", "--process", "nope", "--n", 3, "--replicates", 5, "--seed", 1)
    assert exc.value.code == 1
    assert run("sample", "--process", "crp", "--n", 3, "--replicates", 5, "--seed", 1,
               "--out", tmp_path / "missing" / "x.json") == 2


def test_verify_lemma_c(tmp_path):
    out = tmp_path / "lc.json"
    assert run("verify", "--suite", "lemma-c", "--max-t", 6, "--out", out) == 0
    reports = json.loads(out.read_text())["reports"]
    assert reports and all(r["passed"] for r in reports)


def test_verify_ewens(tmp_path):
    out = tmp_path / "e.json"
    assert run("verify", "--suite", "ewens-normalization", "--n", 10, "--alpha", 2, "--out", out) == 0
    (rep,) = json.loads(out.read_text())["reports"]
    assert rep["value"] < 1e-10 and rep["config"] == {"alpha": 2.0, "n": 10}


def test_verify_equivalence_small(tmp_path):
    out = tmp_path / "eq.json"
    code = run("verify", "--suite", "equivalence", "--n", 4, "--alpha", 1, "--replicates", 200_000,
               "--seed", 3, "--out", out)
    reports = json.loads(out.read_text())["reports"]
    assert {r["config"]["process"] for r in reports} == {"crp", "stick", "both"}
    assert code == 0


def test_verify_failure_exit_code(tmp_path):
    # 50 samples cannot bring TV below 0.02 over 15 cells
    out = tmp_path / "f.json"
    assert run("verify", "--suite", "equivalence", "--n", 4, "--replicates", 50, "--seed", 1, "--out", out) == 3


def test_verify_usage_errors():
    with pytest.raises(SystemExit) as exc:
        run("verify", "--suite", "bogus")
    assert exc.value.code == 1
    assert run("verify", "--suite", "lemma-c", "--K", 4) == 1


def test_report_merge(tmp_path):
    out = tmp_path / "merged.csv"
    assert run("report", "--out", out) == 0
    assert out.read_text().strip() == ",".join(cli.REPORT_COLUMNS)

    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("verify", "--suite", "ewens-normalization", "--n", 5, "--alpha", 2, "--out", a)
    run("verify", "--suite", "ewens-normalization", "--n", 3, "--alpha", 0.5, "--out", b)
    assert run("report", a, b, "--out", out) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [(r["alpha"], r["n"]) for r in rows] == [("0.5", "3"), ("2.0", "5")]

    assert run("report", a, a, "--out", out) == 0
    assert len(list(csv.DictReader(out.open()))) == 2


def test_report_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("report", bad) == 1
    assert "bad.json" in capsys.readouterr().err
