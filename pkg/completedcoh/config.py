"""Line-oriented job configs: parsing into frozen dataclasses and building the inputs.

A config is a list of ``[section]`` blocks.  Most sections hold ``key = value`` lines; the
``[complex]`` section holds either ``library = NAME``, ``file = PATH`` or the complex grammar
of ``complex_core.parse_complex`` inline.  See CONFIG_FORMAT.md for the full schema.
"""

import logging
import os
import re
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .complex_core import Subcomplex, parse_complex
from .errors import ConfigError, InputError, TowerError
from .group_towers import (center_subtower, closure_of, make_abelian_tower, make_custom_tower,
                           make_heisenberg_tower, quotient_tower)
from .library import library_complex
from .local_systems import FlatDescriptor, ensure_descriptor

logger = logging.getLogger(__name__)

KNOWN_CHECKS = ("colimit", "completed", "les", "excise", "nilpotent_collapse", "defect",
                "cech", "shapiro", "transfer")

SECTIONS = ("job", "complex", "subcomplex", "tower", "descriptor", "expect", "defect",
            "quotient", "quotient_complex", "quotient_descriptor")

JOB_DEFAULTS = {"prime": 2, "max_s": 1, "max_r": 2, "jobs": None}

_LEVEL_ROW = re.compile(r"^level\s+(\d+)\s+row\s+(\d+)$")
_LEVEL_PROJECTION = re.compile(r"^level\s+(\d+)\s+projection$")
_DEGREE = re.compile(r"^degree\s+(\d+)$")
_MODULE_PART = re.compile(r"^(?:Z_p(?:\^(\d+))?|Z/(\d+)|0)$")


@dataclass(frozen=True)
class ComplexSource:
    """Where a complex comes from: ``library``, ``file`` or ``inline`` text."""

    kind: str
    value: str
    line: int = 0

    def load(self, base_dir="."):
        if self.kind == "library":
            try:
                return library_complex(self.value), None
            except InputError as exc:
                raise ConfigError(str(exc), line=self.line, field="complex") from exc
        if self.kind == "file":
            path = os.path.join(base_dir, self.value)
            if not os.path.exists(path):
                raise ConfigError("complex file {!r} does not exist".format(self.value),
                                  line=self.line, field="complex")
            with open(path) as handle:
                return parse_complex(handle.read())
        return parse_complex(self.value, first_line=self.line)


@dataclass(frozen=True)
class TowerSpec:
    kind: str = "abelian"
    rank: int = 0
    depth: Optional[int] = None
    rows: Tuple[Tuple[int, int, Tuple[int, ...]], ...] = ()
    projections: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    line: int = 0

    def build(self, p, depth):
        depth = self.depth if self.depth is not None else depth
        try:
            if self.kind == "abelian":
                return make_abelian_tower(self.rank, p, depth)
            if self.kind == "heisenberg":
                return make_heisenberg_tower(p, depth)
            if self.kind == "custom":
                return self._build_custom(p)
        except InputError as exc:
            raise ConfigError(str(exc), line=self.line, field="tower") from exc
        raise ConfigError("unknown tower kind {!r}".format(self.kind), line=self.line,
                          field="tower")

    def _build_custom(self, p):
        levels = sorted({r for r, _, _ in self.rows})
        if levels != list(range(1, len(levels) + 1)):
            raise ConfigError("custom tower levels must be 1..R without gaps", line=self.line,
                              field="tower")
        tables = []
        for r in levels:
            rows = sorted((i, values) for level, i, values in self.rows if level == r)
            if [i for i, _ in rows] != list(range(len(rows))):
                raise ConfigError("level {} rows must be numbered 0..n-1".format(r),
                                  line=self.line, field="tower")
            tables.append([values for _, values in rows])
        projections = dict(self.projections)
        missing = [r for r in levels if r not in projections]
        if missing:
            raise ConfigError("missing projection for level {}".format(missing[0]),
                              line=self.line, field="tower")
        return make_custom_tower(p, tables, [projections[r] for r in levels])


@dataclass(frozen=True)
class Expectation:
    """An expected reconstruction: degree n is Z_p^free plus the given torsion."""

    degree: int
    free: int
    torsion: Tuple[int, ...]
    text: str
    line: int = 0


@dataclass(frozen=True)
class JobConfig:
    name: str
    description: str = ""
    prime: int = 2
    degrees: Optional[Tuple[int, ...]] = None
    max_s: int = 1
    max_r: int = 2
    checks: Tuple[str, ...] = ("completed",)
    jobs: Optional[int] = None
    complex_source: Optional[ComplexSource] = None
    subcomplex: Tuple[Tuple[int, Tuple[str, ...], int], ...] = ()
    tower: TowerSpec = field(default_factory=TowerSpec)
    descriptor: Tuple[Tuple[str, str, int], ...] = ()
    expectations: Tuple[Expectation, ...] = ()
    expected_defect: Optional[int] = None
    defect_generators: Optional[Tuple[str, ...]] = None
    quotient_normal: Optional[str] = None
    quotient_complex: Optional[ComplexSource] = None
    quotient_descriptor: Tuple[Tuple[str, str, int], ...] = ()
    base_dir: str = "."


def _int(value, line, section, key, minimum=None):
    try:
        number = int(value)
    except ValueError:
        raise ConfigError("{} must be an integer, got {!r}".format(key, value), line=line,
                          field=section) from None
    if minimum is not None and number < minimum:
        raise ConfigError("{} must be at least {}".format(key, minimum), line=line,
                          field=section)
    return number


def _ints(value, line, section):
    try:
        return tuple(int(v) for v in value.replace(",", " ").split())
    except ValueError:
        raise ConfigError("expected integers, got {!r}".format(value), line=line,
                          field=section) from None


def parse_module(text, p=None, line=0):
    """Read "0", "Z_p", "Z_p^2", "Z/4" or sums like "Z_p + Z/2" as (free, torsion)."""
    free = 0
    torsion = []
    for part in text.replace(" ", "").split("+"):
        match = _MODULE_PART.match(part)
        if not match:
            raise ConfigError("cannot read module {!r}".format(text), line=line, field="expect")
        if part == "0":
            continue
        if part.startswith("Z_p"):
            free += int(match.group(1) or 1)
            continue
        order = int(match.group(2))
        exponent = 0
        while p is not None and order > 1 and order % p == 0:
            order //= p
            exponent += 1
        if order != 1:
            raise ConfigError("torsion order in {!r} is not a power of p".format(text),
                              line=line, field="expect")
        torsion.append(exponent)
    return free, tuple(sorted(torsion, reverse=True))


def _split_sections(text):
    sections: Dict[str, list] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if current not in SECTIONS:
                raise ConfigError("unknown section [{}]".format(current), line=lineno)
            if current in sections:
                raise ConfigError("section [{}] appears twice".format(current), line=lineno)
            sections[current] = []
            continue
        if not stripped:
            continue
        if current is None:
            raise ConfigError("content before the first section", line=lineno)
        sections[current].append((lineno, raw.split("#", 1)[0].rstrip()))
    return sections


def _pairs(lines, section):
    out = []
    for lineno, raw in lines:
        key, sep, value = raw.partition("=")
        if not sep:
            raise ConfigError("expected 'key = value'", line=lineno, field=section)
        out.append((lineno, key.strip(), value.strip()))
    return out


def _complex_source(lines, section):
    if not lines:
        raise ConfigError("section [{}] is empty".format(section), field=section)
    first_line, first = lines[0]
    key, sep, value = first.partition("=")
    if sep and key.strip() in ("library", "file"):
        if len(lines) > 1:
            raise ConfigError("'{}' must be the only line of [{}]".format(key.strip(), section),
                              line=lines[1][0], field=section)
        return ComplexSource(key.strip(), value.strip(), first_line)
    # keep line numbers for the complex parser
    text = []
    for lineno, raw in lines:
        text.extend([""] * (lineno - first_line - len(text)))
        text.append(raw)
    return ComplexSource("inline", "\n".join(text), first_line)


def _values(lines, section):
    return tuple((key, value, lineno) for lineno, key, value in _pairs(lines, section))


def parse_config(text, base_dir=".", name=None):
    """Parse config text into a JobConfig; errors carry the line and section."""
    sections = _split_sections(text)
    job = {"name": name or "job", "description": ""}
    job.update(JOB_DEFAULTS)
    checks = ("completed",)
    degrees = None
    for lineno, key, value in _pairs(sections.get("job", []), "job"):
        if key in ("name", "description"):
            job[key] = value
        elif key == "prime":
            job["prime"] = _int(value, lineno, "job", key, 2)
        elif key in ("max_s", "max_r"):
            job[key] = _int(value, lineno, "job", key, 1)
        elif key == "jobs":
            job["jobs"] = _int(value, lineno, "job", key, 1)
        elif key == "degrees":
            degrees = _ints(value, lineno, "job")
            if any(n < 0 for n in degrees):
                raise ConfigError("degrees must be non-negative", line=lineno, field="job")
        elif key == "checks":
            checks = tuple(value.replace(",", " ").split())
            unknown = [c for c in checks if c not in KNOWN_CHECKS]
            if unknown:
                raise ConfigError("unknown check {!r}; known: {}".format(
                    unknown[0], ", ".join(KNOWN_CHECKS)), line=lineno, field="job")
        else:
            raise ConfigError("unknown key {!r}".format(key), line=lineno, field="job")
    if "complex" not in sections:
        raise ConfigError("missing [complex] section", field="complex")
    source = _complex_source(sections["complex"], "complex")
    subcomplex = []
    for lineno, raw in sections.get("subcomplex", []):
        head, sep, rest = raw.partition(":")
        if not sep or not head.strip().isdigit():
            raise ConfigError("expected 'N: cells...'", line=lineno, field="subcomplex")
        subcomplex.append((int(head), tuple(rest.split()), lineno))
    tower = _tower_spec(sections.get("tower"))
    expectations = []
    expected_defect = None
    for lineno, key, value in _pairs(sections.get("expect", []), "expect"):
        match = _DEGREE.match(key)
        if match:
            free, torsion = parse_module(value, job["prime"], lineno)
            expectations.append(Expectation(int(match.group(1)), free, torsion, value, lineno))
        elif key == "defect":
            expected_defect = _int(value, lineno, "expect", key, 0)
        else:
            raise ConfigError("unknown expectation {!r}".format(key), line=lineno,
                              field="expect")
    generators = None
    for lineno, key, value in _pairs(sections.get("defect", []), "defect"):
        if key != "generators":
            raise ConfigError("unknown key {!r}".format(key), line=lineno, field="defect")
        generators = tuple(value.replace(",", " ").split())
    normal = None
    for lineno, key, value in _pairs(sections.get("quotient", []), "quotient"):
        if key != "normal":
            raise ConfigError("unknown key {!r}".format(key), line=lineno, field="quotient")
        normal = value
    quotient_source = None
    if "quotient_complex" in sections:
        quotient_source = _complex_source(sections["quotient_complex"], "quotient_complex")
    config = JobConfig(
        name=job["name"], description=job["description"], prime=job["prime"],
        degrees=degrees, max_s=job["max_s"], max_r=job["max_r"], checks=checks,
        jobs=job["jobs"], complex_source=source, subcomplex=tuple(subcomplex), tower=tower,
        descriptor=_values(sections.get("descriptor", []), "descriptor"),
        expectations=tuple(expectations), expected_defect=expected_defect,
        defect_generators=generators, quotient_normal=normal,
        quotient_complex=quotient_source,
        quotient_descriptor=_values(sections.get("quotient_descriptor", []),
                                    "quotient_descriptor"),
        base_dir=base_dir)
    if "nilpotent_collapse" in checks and (normal is None or quotient_source is None):
        raise ConfigError("nilpotent_collapse needs [quotient] and [quotient_complex]",
                          field="quotient")
    return config


def _tower_spec(lines):
    if lines is None:
        return TowerSpec()
    fields = {"kind": "abelian", "rank": 0, "depth": None}
    rows = []
    projections = []
    first = lines[0][0] if lines else 0
    for lineno, key, value in _pairs(lines, "tower"):
        row = _LEVEL_ROW.match(key)
        projection = _LEVEL_PROJECTION.match(key)
        if row:
            rows.append((int(row.group(1)), int(row.group(2)), _ints(value, lineno, "tower")))
        elif projection:
            projections.append((int(projection.group(1)), _ints(value, lineno, "tower")))
        elif key == "kind":
            fields["kind"] = value
        elif key in ("rank", "depth"):
            fields[key] = _int(value, lineno, "tower", key, 0)
        else:
            raise ConfigError("unknown key {!r}".format(key), line=lineno, field="tower")
    return TowerSpec(fields["kind"], fields["rank"], fields["depth"], tuple(rows),
                     tuple(projections), first)


def load_config(path):
    """Read a config file; relative complex paths resolve against its directory."""
    if not os.path.exists(path):
        raise ConfigError("config file {!r} does not exist".format(path))
    with open(path) as handle:
        text = handle.read()
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)), name=name)


@dataclass(frozen=True)
class Job:
    """The built inputs of a config: complex, relative subcomplex, descriptor, quotient."""

    config: JobConfig
    complex: object
    rel: Optional[Subcomplex]
    descriptor: FlatDescriptor
    degrees: Tuple[int, ...]
    normal: object = None
    quotient_descriptor: Optional[FlatDescriptor] = None


def _descriptor(complex_, tower, values, section):
    if not values:
        return FlatDescriptor.trivial(complex_, tower)
    try:
        descriptor = FlatDescriptor.from_values(
            complex_, tower, {key: value for key, value, _ in values})
        return ensure_descriptor(descriptor)
    except InputError as exc:
        line = None
        cell = getattr(exc, "cell", None)
        for key, _, lineno in values:
            if key == cell:
                line = lineno
        raise ConfigError(str(exc), line=line, field=section) from exc


def build_job(config, max_r=None):
    """Load the complex and build tower and descriptors; InputError on invalid input."""
    R = config.max_r if max_r is None else max_r
    complex_, inline_sub = config.complex_source.load(config.base_dir)
    rel = inline_sub
    if config.subcomplex:
        selected = {}
        for n, cells, lineno in config.subcomplex:
            if n > complex_.dim:
                raise ConfigError("subcomplex dimension {} beyond the complex".format(n),
                                  line=lineno, field="subcomplex")
            for cell in cells:
                if cell not in complex_.labels[n] and not cell.isdigit():
                    raise ConfigError("unknown {}-cell {!r}".format(n, cell), line=lineno,
                                      field="subcomplex")
                selected.setdefault(n, []).append(int(cell) if cell.isdigit() else cell)
        rel = Subcomplex.from_cells(complex_, selected)
        report = rel.validate(complex_)
        if not report.ok:
            raise ConfigError(report.message, line=config.subcomplex[0][2], field="subcomplex")
    degrees = config.degrees
    if degrees is None:
        degrees = tuple(range(complex_.dim + 1))
    for n in degrees:
        if n > complex_.dim:
            raise ConfigError("degree {} exceeds the complex dimension {}".format(
                n, complex_.dim), field="job")
    tower = config.tower.build(config.prime, R)
    if tower.depth < R:
        raise ConfigError("tower depth {} is below max_r {}".format(tower.depth, R),
                          line=config.tower.line, field="tower")
    descriptor = _descriptor(complex_, tower, config.descriptor, "descriptor")
    normal = None
    quotient = None
    if config.quotient_normal is not None:
        normal = _normal_subtower(tower, config.quotient_normal)
        if config.quotient_complex is not None:
            qcomplex, _ = config.quotient_complex.load(config.base_dir)
            try:
                qtower = quotient_tower(tower, normal)
            except InputError as exc:
                raise ConfigError(str(exc), field="quotient") from exc
            quotient = _descriptor(qcomplex, qtower, config.quotient_descriptor,
                                   "quotient_descriptor")
    logger.info("job %s: complex cells %s, tower %s, R=%d, S=%d", config.name,
                complex_.cells_per_dim, tower.describe(), R, config.max_s)
    return Job(config, complex_, rel, descriptor, tuple(degrees), normal, quotient)


def _normal_subtower(tower, text):
    if text == "center":
        try:
            return center_subtower(tower)
        except TowerError as exc:
            raise ConfigError(str(exc), field="quotient") from exc
    try:
        elements = [tower.element(part) for part in text.split(";") if part.strip()]
    except InputError as exc:
        raise ConfigError(str(exc), field="quotient") from exc
    return closure_of(tower, elements)
