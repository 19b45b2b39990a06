"""Batch runner: config in, checks executed over the job grid, reports out.

Exit status: 0 when every requested check passes, 1 when a check fails, 2 on invalid input.
"""

import argparse
import dataclasses
import glob
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Tuple

from .cech_compare import compare_with_cellular
from .config import KNOWN_CHECKS, build_job, load_config
from .errors import ChainMapError, CheckFailure, ConfigError, InputError
from .limits_engine import (CONFIDENCE_INCONSISTENT, completed_cohomology, defect_estimate,
                            excise_reduce, les_check, nilpotent_collapse_check, shapiro_check,
                            transfer_check)
from .log import configure_logging
from .report import determinism_hash, emit_matrices, summary_table, write_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2

BUILTIN_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "builtin")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    summary: str
    data: Dict

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "summary": self.summary,
                "data": self.data}


@dataclass(frozen=True)
class RunReport:
    name: str
    p: int
    S: int
    R: int
    degrees: Tuple[int, ...]
    checks: Tuple[CheckResult, ...]
    timings: Dict[str, float]

    def check(self, name):
        return next((c for c in self.checks if c.name == name), None)

    @property
    def failed(self):
        return tuple(c for c in self.checks if not c.passed)

    @property
    def passed(self):
        return not self.failed

    def numeric(self):
        return {"name": self.name, "p": self.p, "S": self.S, "R": self.R,
                "degrees": list(self.degrees), "checks": [c.to_dict() for c in self.checks]}

    @property
    def digest(self):
        return determinism_hash(self.numeric())

    def to_dict(self):
        data = self.numeric()
        data["schema"] = 1
        data["passed"] = self.passed
        data["determinism_hash"] = self.digest
        data["timings"] = dict(self.timings)
        return data

    def raise_for_failures(self):
        if self.failed:
            names = ", ".join(c.name for c in self.failed)
            raise CheckFailure("checks failed: {}".format(names),
                               dump={c.name: c.data for c in self.failed})


class _Context:
    """Shared state of one run; the completed report is computed once."""

    def __init__(self, job, S, R, executor):
        self.job = job
        self.S = S
        self.R = R
        self.executor = executor
        self._completed = None

    @property
    def p(self):
        return self.job.descriptor.tower.p

    def completed(self):
        if self._completed is None:
            self._completed = completed_cohomology(self.job.descriptor, self.job.rel,
                                                   self.job.degrees, self.S, self.R,
                                                   self.executor)
        return self._completed


def _check_colimit(ctx):
    report = ctx.completed()
    total = 0
    certified = 0
    for degree in report.degrees:
        for per_s in degree.colimits:
            for approximation in per_s:
                total += 1
                certified += approximation.certified
    data = {"degrees": [{"degree": d.degree,
                         "colimits": [[c.to_dict() for c in per_s] for per_s in d.colimits]}
                        for d in report.degrees]}
    return True, "{} of {} colimits certified".format(certified, total), data


def _check_completed(ctx):
    report = ctx.completed()
    problems = []
    for degree in report.degrees:
        if degree.confidence == CONFIDENCE_INCONSISTENT:
            problems.append("degree {} inconsistent across precisions".format(degree.degree))
    for expectation in ctx.job.config.expectations:
        try:
            degree = report.degree(expectation.degree)
        except KeyError:
            problems.append("degree {} was not computed".format(expectation.degree))
            continue
        got = (degree.free_rank, degree.torsion)
        if got != (expectation.free, expectation.torsion):
            problems.append("degree {}: expected {}, got {} ({})".format(
                expectation.degree, expectation.text, degree.describe(ctx.p),
                degree.confidence))
    text = ", ".join("H{}={}".format(d.degree, d.describe(ctx.p)) for d in report.degrees)
    data = {"report": report.to_dict(matrices=False), "problems": problems}
    return not problems, "; ".join(problems) or text, data


def _require_rel(ctx, check):
    if ctx.job.rel is None:
        raise ConfigError("check '{}' needs a [subcomplex] section".format(check),
                          field="subcomplex")
    return ctx.job.rel


def _check_les(ctx):
    les = les_check(ctx.job.descriptor, _require_rel(ctx, "les"), ctx.job.degrees, ctx.S,
                    ctx.R, ctx.executor)
    failure = les.first_failure()
    if les.exact:
        summary = "exact at {} joints".format(len(les.joints))
    elif failure is not None:
        summary = "not exact at level {} position {}".format(failure.level, failure.position)
    else:
        summary = "alternating sum of orders is not zero"
    return les.exact, summary, les.to_dict(matrices=False)


def _check_excise(ctx):
    result = excise_reduce(ctx.job.descriptor, ctx.job.degrees, range(ctx.R + 1),
                           range(1, ctx.S + 1), ctx.executor)
    bad = [e for e in result.certificate if not e.ok]
    if bad:
        first = bad[0]
        summary = "degree {} level {} s={}: {} vs {} x {}".format(
            first.degree, first.level, first.s, list(first.full), list(first.reduced),
            first.index)
    else:
        summary = "induction certified on {} cells".format(len(result.certificate))
    return result.certified, summary, result.to_dict()


def _check_nilpotent(ctx):
    job = ctx.job
    if job.quotient_descriptor is None:
        raise ConfigError("nilpotent_collapse needs [quotient_complex]", field="quotient")
    verdict = nilpotent_collapse_check(job.descriptor, job.normal, job.quotient_descriptor,
                                       None, ctx.S, ctx.R, ctx.executor)
    passed = verdict.equal and bool(verdict.compared)
    if passed:
        summary = "agree in degrees {}".format(",".join(str(c[0]) for c in verdict.compared))
    else:
        summary = "; ".join("degree {}: {} vs {}".format(n, a, b)
                            for n, a, b, same in verdict.compared if not same)
        summary = summary or "no degree certified on both sides"
    return passed, summary, verdict.to_dict()


def _check_defect(ctx):
    job = ctx.job
    estimate = defect_estimate(job.descriptor, job.config.defect_generators, ctx.S, ctx.R,
                               ctx.executor)
    expected = job.config.expected_defect
    passed = estimate.agrees and (expected is None or expected == estimate.defect)
    summary = "defect {}{} (algebraic {})".format(
        estimate.defect, " (lower bound)" if estimate.lower_bound else "", estimate.algebraic)
    if expected is not None and expected != estimate.defect:
        summary += ", expected {}".format(expected)
    return passed, summary, estimate.to_dict()


def _check_cech(ctx):
    job = ctx.job
    data = {"absolute": compare_with_cellular(job.complex, None, ctx.p, ctx.S).to_dict()}
    if job.rel is not None:
        data["relative"] = compare_with_cellular(job.complex, job.rel, ctx.p, ctx.S).to_dict()
    passed = all(part["agree"] for part in data.values())
    if passed:
        summary = "agrees with cellular ({})".format(", ".join(sorted(data)))
    else:
        summary = "differs from cellular ({})".format(
            ", ".join(k for k, v in sorted(data.items()) if not v["agree"]))
    return passed, summary, data


def _check_shapiro(ctx):
    reports = [shapiro_check(ctx.job.descriptor, r, ctx.S) for r in range(ctx.R + 1)]
    passed = all(r.ok for r in reports)
    bad = [r.level for r in reports if not r.ok]
    summary = "levels 0..{} agree".format(ctx.R) if passed else "levels {} differ".format(bad)
    return passed, summary, {"levels": [r.to_dict() for r in reports]}


def _check_transfer(ctx):
    report = transfer_check(ctx.job.descriptor, ctx.S, ctx.R, ctx.executor)
    if not report.applicable:
        return False, "not applicable: {}".format(report.reason), report.to_dict()
    summary = "top degree maps are the index" if report.ok else "index mismatch"
    return report.ok, summary, report.to_dict()


CHECKS = {
    "colimit": _check_colimit,
    "completed": _check_completed,
    "les": _check_les,
    "excise": _check_excise,
    "nilpotent_collapse": _check_nilpotent,
    "defect": _check_defect,
    "cech": _check_cech,
    "shapiro": _check_shapiro,
    "transfer": _check_transfer,
}


def default_jobs():
    value = os.environ.get("COMPLETEDCOH_JOBS")
    if value and value.isdigit() and int(value) > 0:
        return int(value)
    return 1


def apply_overrides(config, degrees=None, max_r=None, max_s=None, checks=None, jobs=None):
    """Command-line flags take precedence over the [job] section."""
    changes = {}
    if degrees is not None:
        changes["degrees"] = tuple(degrees)
    if max_r is not None:
        if max_r < 1:
            raise ConfigError("--max-r must be at least 1")
        changes["max_r"] = max_r
    if max_s is not None:
        if max_s < 1:
            raise ConfigError("--max-s must be at least 1")
        changes["max_s"] = max_s
    if checks is not None:
        unknown = [c for c in checks if c not in KNOWN_CHECKS]
        if unknown:
            raise ConfigError("unknown check {!r}".format(unknown[0]))
        changes["checks"] = tuple(checks)
    if jobs is not None:
        changes["jobs"] = jobs
    return dataclasses.replace(config, **changes) if changes else config


def run(config, jobs=None):
    """Execute every requested check; results are assembled in grid order."""
    width = jobs or config.jobs or default_jobs()
    job = build_job(config)
    S, R = config.max_s, config.max_r
    results = []
    timings = {}
    executor = ProcessPoolExecutor(max_workers=width) if width > 1 else None
    try:
        ctx = _Context(job, S, R, executor)
        for name in config.checks:
            start = time.perf_counter()
            passed, summary, data = CHECKS[name](ctx)
            timings[name] = round(time.perf_counter() - start, 6)
            if passed:
                logger.info("check %s passed: %s", name, summary)
            else:
                logger.warning("check %s FAILED: %s", name, summary)
            results.append(CheckResult(name, passed, summary, data))
    finally:
        if executor is not None:
            executor.shutdown()
    return RunReport(config.name, job.descriptor.tower.p, S, R, job.degrees, tuple(results),
                     timings)


def builtin_path(name):
    return os.path.join(BUILTIN_DIR, name + ".cfg")


def list_builtin_examples():
    """(name, description) of every bundled config, sorted by name."""
    catalog = []
    for path in sorted(glob.glob(os.path.join(BUILTIN_DIR, "*.cfg"))):
        config = load_config(path)
        catalog.append((config.name, config.description))
    return catalog


def resolve_config(reference):
    """A config path, or the name of a bundled config."""
    if os.path.exists(reference):
        return load_config(reference)
    if os.path.exists(builtin_path(reference)):
        return load_config(builtin_path(reference))
    raise ConfigError("no config file or builtin example named {!r}".format(reference))


def _int_list(text):
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected integers, got {!r}".format(text)) from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="completedcoh",
        description="Completed cohomology of towers of finite covers of Delta-complexes")
    parser.add_argument("config", nargs="?", help="config file or builtin example name")
    parser.add_argument("--degrees", type=_int_list, help="degrees, e.g. 0,1,2")
    parser.add_argument("--max-r", type=int, dest="max_r", help="deepest tower level R")
    parser.add_argument("--max-s", type=int, dest="max_s", help="largest precision S")
    parser.add_argument("--checks", type=lambda t: t.replace(",", " ").split(),
                        help="comma separated subset of: " + ", ".join(KNOWN_CHECKS))
    parser.add_argument("--out", help="write the JSON report here")
    parser.add_argument("--jobs", type=int, help="worker processes (default $COMPLETEDCOH_JOBS or 1)")
    parser.add_argument("--emit-matrices", dest="emit_matrices", metavar="DIR",
                        help="write the twisted coboundary matrices as triplet files")
    parser.add_argument("--list", action="store_true", help="list the builtin examples")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--summary-only", action="store_true", dest="summary_only",
                        help="print the summary table but not the JSON report")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    if args.list:
        for name, description in list_builtin_examples():
            print("{:<20} {}".format(name, description))
        return EXIT_OK
    if not args.config:
        print("error: a config path or builtin name is required (see --list)", file=sys.stderr)
        return EXIT_INVALID_INPUT
    try:
        config = apply_overrides(resolve_config(args.config), args.degrees, args.max_r,
                                 args.max_s, args.checks, args.jobs)
        report = run(config)
        if args.emit_matrices:
            emit_matrices(build_job(config), args.emit_matrices, config.max_r, config.max_s)
    except InputError as exc:
        print("error: {}".format(exc), file=sys.stderr)
        return EXIT_INVALID_INPUT
    except ChainMapError as exc:
        print("error: {} (degree {}, witness {})".format(exc, exc.degree, exc.witness),
              file=sys.stderr)
        return EXIT_CHECK_FAILED
    except CheckFailure as exc:
        print("error: {}".format(exc), file=sys.stderr)
        print(json.dumps(exc.dump, sort_keys=True), file=sys.stderr)
        return EXIT_CHECK_FAILED
    data = report.to_dict()
    if args.out:
        write_report(args.out, data)
    print(summary_table(report))
    if not args.out and not args.summary_only:
        print(json.dumps(data, indent=2, sort_keys=True))
    try:
        report.raise_for_failures()
    except CheckFailure as exc:
        print("error: {}".format(exc), file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK
