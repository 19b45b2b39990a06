"""JSON reports, the human summary table, and the determinism hash."""

import hashlib
import json
import logging
import os

from .local_systems import twisted_complex
from .smith_engine import dump_triplets

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# keys that vary between runs and stay out of the determinism hash
VOLATILE_KEYS = ("timings", "determinism_hash")


def _stable(data):
    if isinstance(data, dict):
        return {str(k): _stable(v) for k, v in data.items() if k not in VOLATILE_KEYS}
    if isinstance(data, (list, tuple)):
        return [_stable(v) for v in data]
    return data


def canonical_json(data):
    return json.dumps(_stable(data), sort_keys=True, separators=(",", ":"))


def determinism_hash(data):
    """sha256 of the canonical JSON of every numeric output (timings excluded)."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def write_report(path, data):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")
    logger.info("report written to %s", path)


def summary_table(report):
    """Plain-text summary: one line per check, then the reconstructed groups."""
    lines = ["job {}  (p={}, S={}, R={})".format(report.name, report.p, report.S, report.R)]
    width = max([len(c.name) for c in report.checks] + [5])
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append("  {:<{w}}  {}  {}".format(check.name, status, check.summary, w=width))
    completed = report.check("completed")
    if completed is not None:
        lines.append("  degree  reconstruction            confidence")
        for entry in completed.data["report"]["degrees"]:
            lines.append("  {:>6}  {:<24}  {}".format(
                entry["degree"], entry["reconstruction"]["text"], entry["confidence"]))
    lines.append("  hash {}".format(report.digest))
    return "\n".join(lines)


def emit_matrices(job, directory, R, S):
    """Write every twisted coboundary d^n at level r, precision s as a triplet file."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for s in range(1, S + 1):
        for r in range(R + 1):
            complex_ = twisted_complex(job.descriptor, rel=job.rel, r=r, s=s)
            for n in range(complex_.top_degree):
                name = "d{}_r{}_s{}.txt".format(n, r, s)
                with open(os.path.join(directory, name), "w") as handle:
                    handle.write(dump_triplets(complex_.differential(n)))
                written.append(name)
    logger.info("wrote %d coboundary matrices to %s", len(written), directory)
    return written
