"""Command-line entry point: ``crpstick sample | verify | report``.

Exit codes: 0 success, 1 usage or validation error, 2 I/O error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, kernels, samplers, suites
from .errors import InvalidInputError
from .rng import RandomSource
from .stats import EmpiricalDistribution, TestReport

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_FAIL = 0, 1, 2, 3
PROCESSES = ("crp", "stick", "polya", "size-biased")
# replicates per RNG batch; fixes the batch -> counter mapping, so output
# does not depend on the number of workers
BATCH_REPLICATES = 1 << 18
REPORT_COLUMNS = ("suite", "statistic", "value", "threshold", "passed", "sample_size", "alpha", "n", "config", "details")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass
class ExperimentConfig:
    process: str
    alpha: float
    n: int
    replicates: int
    seed: int
    stream: int = 0
    sizes: list[int] | None = None
    raw: bool = False
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.process not in PROCESSES:
            raise InvalidInputError(f"unknown process {self.process!r}")
        if self.format not in ("json", "csv"):
            raise InvalidInputError(f"unknown format {self.format!r}")
        if not self.alpha > 0 or not np.isfinite(self.alpha):
            raise InvalidInputError("alpha must be positive")
        if self.n < 1 or self.replicates < 1:
            raise InvalidInputError("n and replicates must be positive")
        if not 0 <= self.seed < 1 << 64 or not 0 <= self.stream < 1 << 64:
            raise InvalidInputError("seed and stream must be 64-bit unsigned")
        if self.process == "size-biased":
            if not self.sizes:
                raise InvalidInputError("--sizes is required for size-biased")
            self.n = len(self.sizes)


def _draw_batch(cfg: ExperimentConfig, batch: int, count: int) -> np.ndarray:
    src = RandomSource(cfg.seed, cfg.stream, batch)
    if cfg.process == "crp":
        return samplers.crp_batch(cfg.n, cfg.alpha, count, src)
    if cfg.process == "stick":
        return samplers.stick_breaking_batch(cfg.n, cfg.alpha, count, src)
    if cfg.process == "polya":
        return samplers.polya_batch(cfg.n, cfg.alpha, count, src)
    return samplers.size_biased_batch(cfg.sizes, count, src)


def _run_batch(args):
    cfg, batch, count = args
    draws = _draw_batch(cfg, batch, count)
    keyed = kernels.rgs_rows(draws) if cfg.process == "stick" else draws
    return EmpiricalDistribution.from_rows(keyed), (draws.tolist() if cfg.raw else None)


def run_sample(cfg: ExperimentConfig, workers: int = 1, progress=True):
    """Empirical distribution (and raw draws if requested), merged over batches."""
    jobs = []
    done = 0
    batch = 0
    while done < cfg.replicates:
        count = min(BATCH_REPLICATES, cfg.replicates - done)
        jobs.append((cfg, batch, count))
        done += count
        batch += 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = ex.map(_run_batch, jobs)
            results = _with_progress(results, len(jobs), progress)
            results = list(results)
    else:
        results = list(_with_progress(map(_run_batch, jobs), len(jobs), progress))
    emp = EmpiricalDistribution()
    draws = [] if cfg.raw else None
    for e, d in results:
        emp = emp.merge(e)
        if d is not None:
            draws.extend(d)
    return emp, draws


def _with_progress(results, total, enabled):
    for i, r in enumerate(results, start=1):
        if enabled and total > 1:
            print(f"[sample] batch {i}/{total}", file=sys.stderr, flush=True)
        yield r


def render_sample(cfg: ExperimentConfig, emp: EmpiricalDistribution, draws) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "count"])
        for k, v in sorted(emp.counts.items()):
            w.writerow([k, v])
        return buf.getvalue()
    # destination is not part of the experiment; keeps copies byte-identical
    config = {k: v for k, v in asdict(cfg).items() if k != "out"}
    doc = {"config": config, "version": __version__, **emp.to_json()}
    if draws is not None:
        doc["draws"] = draws
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _check_writable(out: str | None) -> None:
    if out is None:
        return
    path = Path(out)
    parent = path.parent if str(path.parent) else Path(".")
    if path.is_dir() or not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {out}")


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)


def cmd_sample(args) -> int:
    try:
        cfg = ExperimentConfig(
            process=args.process,
            alpha=args.alpha,
            n=args.n if args.n is not None else 1,
            replicates=args.replicates,
            seed=args.seed,
            stream=args.stream,
            sizes=args.sizes,
            raw=args.raw,
            out=args.out,
            format=args.format,
        )
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from exc
    if args.n is None and cfg.process != "size-biased":
        raise UsageError("--n is required")
    _check_writable(cfg.out)
    emp, draws = run_sample(cfg, workers=args.workers, progress=not args.quiet)
    _write(render_sample(cfg, emp, draws), cfg.out)
    return EXIT_OK


def _suite_kwargs(args) -> dict:
    kw = {}
    suite = args.suite
    if args.alpha:
        if suite == "equivalence":
            if len(args.alpha) != 1:
                raise UsageError("equivalence takes a single --alpha")
            kw["alpha"] = args.alpha[0]
        else:
            kw["alphas"] = tuple(args.alpha)
    if args.n is not None:
        if suite == "ewens-normalization":
            kw["ns"] = range(1, args.n + 1) if args.n_range else [args.n]
        elif suite in ("recombination", "lemma-a"):
            kw["n_max"] = args.n
        elif suite in ("lemma-b", "polya", "equivalence", "beta-limit"):
            kw["n"] = args.n
        else:
            raise UsageError(f"--n not accepted by {suite}")
    simple = {
        "replicates": ("polya", "equivalence", "beta-limit", "size-biased"),
        "seed": ("polya", "equivalence", "beta-limit", "size-biased", "lemma-c"),
        "max_t": ("lemma-c",),
        "K": ("lemma-b",),
        "sizes": ("size-biased",),
    }
    for name, allowed in simple.items():
        val = getattr(args, name)
        if val is None:
            continue
        if suite not in allowed:
            raise UsageError(f"--{name.replace('_', '-')} not accepted by {suite}")
        kw[name] = tuple(val) if name == "sizes" else val
    return kw


def cmd_verify(args) -> int:
    kw = _suite_kwargs(args)
    _check_writable(args.out)
    try:
        reports = suites.SUITES[args.suite](**kw)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from exc
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.suite} {r.statistic}={r.value:.6g} <= {r.threshold:.6g} {r.config}",
              file=sys.stderr)
    text = json.dumps({"reports": [r.to_dict() for r in reports]}, sort_keys=True, indent=1) + "\n"
    _write(text, args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _load_reports(path: str) -> list[TestReport]:
    try:
        doc = json.loads(Path(path).read_text())
        items = doc["reports"] if isinstance(doc, dict) and "reports" in doc else [doc]
        return [TestReport.from_dict(d) for d in items]
    except OSError:
        raise
    except (ValueError, KeyError, TypeError, InvalidInputError) as exc:
        raise UsageError(f"{path}: not a report file ({exc})") from exc


def _sort_key(r: TestReport):
    a = r.config.get("alpha")
    n = r.config.get("n")
    return (
        r.suite,
        float("-inf") if a is None else float(a),
        -1 if n is None else int(n),
    )


def reports_to_csv(reports: list[TestReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in sorted(reports, key=_sort_key):
        w.writerow([
            r.suite, r.statistic, repr(r.value), repr(r.threshold), r.passed, r.sample_size,
            r.config.get("alpha", ""), r.config.get("n", ""),
            json.dumps(r.config, sort_keys=True), json.dumps(r.details, sort_keys=True),
        ])
    return buf.getvalue()


def cmd_report(args) -> int:
    reports = []
    for path in args.inputs:
        reports.extend(_load_reports(path))
    _write(reports_to_csv(reports), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crpstick", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="draw replicates and write their empirical distribution")
    s.add_argument("--process", required=True, choices=PROCESSES)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--n", type=int)
    s.add_argument("--sizes", type=int, nargs="+", help="ball sizes for size-biased")
    s.add_argument("--replicates", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--raw", action="store_true", help="also store every draw")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--quiet", action="store_true", help="no progress on stderr")
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=sorted(suites.SUITES))
    v.add_argument("--alpha", type=float, action="append")
    v.add_argument("--n", type=int)
    v.add_argument("--n-range", action="store_true", help="ewens-normalization: use 1..n")
    v.add_argument("--replicates", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--max-t", dest="max_t", type=int)
    v.add_argument("--K", type=int)
    v.add_argument("--sizes", type=int, nargs="+")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="merge report files into one CSV")
    r.add_argument("inputs", nargs="*")
    r.add_argument("--out")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"crpstick: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"crpstick: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
