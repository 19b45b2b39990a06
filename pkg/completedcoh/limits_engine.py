"""Colimits over tower levels, reconstruction over precisions, and structural verifiers.

For a fixed precision s the groups A_r = H^n(level r) form a chain A_0 -> A_1 -> ... -> A_R.
With a lookahead k >= 1 put W_r = im(A_r -> A_{r+k}).  The colimit is certified at (r0, k)
when every induced map W_r -> W_{r+1}, r0 <= r <= R-k-1, is an isomorphism; the certified
value is the cyclic type of W_{r0}.  The smallest k is tried first, then the smallest r0.

On towers whose levels are abelian and grow, two consecutive isomorphisms A_r -> A_{r+1} ->
A_{r+2} must be followed by isomorphisms up to R; a violation raises CheckFailure.

Over the precisions, only the classes of the level-s colimit that lift to every higher
precision survive in the limit.  At a fixed level r they are the image of the reduction from
precision s + b, where p^b is the largest elementary divisor of the integral d^n at level r.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from sympy import multiplicity

from . import abelian
from .complex_core import Subcomplex, build_cover, components
from .errors import CheckFailure, DescriptorError, InputError, TowerError
from .group_towers import AbelianTower, QuotientTower, SubgroupTower, closure_of
from .local_systems import (FlatDescriptor, cochain_inclusion, constant_complex,
                            deck_translation, ensure_descriptor, pair_sequence,
                            precision_reduction, restrict_descriptor, twisted_complex)
from .smith_engine import (SparseMatrix, all_cohomology, cohomology, induced_map,
                           local_smith, smith_normal_form, valuation)

logger = logging.getLogger(__name__)

CERTIFIED_ISO = "certified-iso"
NOT_STABILIZED = "not-stabilized"

CONFIDENCE_CERTIFIED = "certified"
CONFIDENCE_PARTIAL = "partial"
CONFIDENCE_INCONSISTENT = "inconsistent"
CONFIDENCE_NONE = "none"


def _map(executor, fn, jobs):
    if executor is None:
        return [fn(job) for job in jobs]
    return list(executor.map(fn, jobs))


def _build(descriptor, rel, r, s):
    return twisted_complex(descriptor, rel=rel, r=r, s=s)


def _level_job(job):
    descriptor, rel, r, s, degrees = job
    complex_ = _build(descriptor, rel, r, s)
    results = tuple(cohomology(complex_, n) for n in degrees)
    logger.info("level r=%d s=%d: %s", r, s,
                ", ".join("H^{}={}".format(n, h.describe()) for n, h in zip(degrees, results)))
    return results


@dataclass(frozen=True)
class Stabilization:
    flag: str
    r0: Optional[int] = None
    lookahead: Optional[int] = None
    value: Optional[Tuple[int, ...]] = None

    @property
    def certified(self):
        return self.flag == CERTIFIED_ISO

    def to_dict(self):
        return {"flag": self.flag, "r0": self.r0, "lookahead": self.lookahead,
                "value": list(self.value) if self.value is not None else None}


def _reduce_rows(matrix, exps, p):
    return [[v % p ** exps[i] for v in row] for i, row in enumerate(matrix)]


def composite_maps(transitions, exps, p):
    """Matrices of A_r -> A_t for all r <= t, keyed by (r, t)."""
    levels = len(exps)
    out = {}
    for r in range(levels):
        out[(r, r)] = abelian.identity(len(exps[r]))
        for t in range(r + 1, levels):
            step = [list(row) for row in transitions[t - 1]]
            out[(r, t)] = _reduce_rows(abelian.compose(step, out[(r, t - 1)]), exps[t], p)
    return out


def persistence_steps(tower, R):
    """Steps r (A_r -> A_{r+1}) where level r+1 is abelian and larger than level r."""
    return tuple(r for r in range(R)
                 if tower.order(r + 1) > tower.order(r)
                 and tower.level(r + 1).is_abelian(tower.generators(r + 1)))


def check_isomorphisms_persist(transitions, exps, p, steps=None, degree=None):
    """Raise CheckFailure if two consecutive isomorphisms are followed by a non-isomorphism.

    Only the steps listed in ``steps`` count (all of them by default); the two opening
    isomorphisms must be between nonzero groups.
    """
    steps = tuple(range(len(transitions))) if steps is None else tuple(steps)

    def iso(r):
        return abelian.is_isomorphism([list(row) for row in transitions[r]], exps[r],
                                      exps[r + 1], p)

    start = next((i for i in range(len(steps) - 1)
                  if exps[steps[i]] and exps[steps[i + 1]]
                  and iso(steps[i]) and iso(steps[i + 1])), None)
    if start is None:
        return
    for r in steps[start + 2:]:
        if iso(r):
            continue
        matrix = [list(row) for row in transitions[r]]
        dump = {"degree": degree,
                "isomorphisms": [steps[start], steps[start + 1]],
                "step": [r, r + 1],
                "matrix": matrix,
                "source": list(exps[r]),
                "target": list(exps[r + 1]),
                "kernel_exponent": abelian.kernel_exponent(matrix, exps[r], exps[r + 1], p),
                "image_exponent": abelian.image_exponent(matrix, exps[r + 1], p)}
        logger.error("isomorphisms at steps %d and %d, then none at step %d",
                     steps[start], steps[start + 1], r)
        raise CheckFailure("transition {} -> {} is not an isomorphism after isomorphisms "
                           "from level {}".format(r, r + 1, steps[start]), dump=dump)


def find_stabilization(transitions, exps, p, steps=None, degree=None):
    """Search (k, r0) as described in the module docstring.

    ``steps`` and ``degree`` are passed to check_isomorphisms_persist first.
    """
    check_isomorphisms_persist(transitions, exps, p, steps, degree)
    R = len(exps) - 1
    comp = composite_maps(transitions, exps, p)
    memo = {}

    def image(r, t):
        if (r, t) not in memo:
            memo[(r, t)] = abelian.image_exponent(comp[(r, t)], exps[t], p)
        return memo[(r, t)]

    for k in range(1, R):
        for r0 in range(0, R - k):
            if all(image(r, r + k) == image(r, r + k + 1) == image(r + 1, r + k + 1)
                   for r in range(r0, R - k)):
                value = abelian.image_type(comp[(r0, r0 + k)], exps[r0 + k], p)
                return Stabilization(CERTIFIED_ISO, r0, k, value), comp
    return Stabilization(NOT_STABILIZED), comp


@dataclass(frozen=True)
class ColimitApproximation:
    degree: int
    p: int
    s: int
    levels: Tuple
    transitions: Tuple
    stabilization: Stabilization
    action_trivial: Optional[bool] = None

    @property
    def certified(self):
        return self.stabilization.certified

    @property
    def value(self):
        return self.stabilization.value

    def to_dict(self, matrices=True):
        out = {
            "degree": self.degree,
            "s": self.s,
            "levels": [list(h.invariants) for h in self.levels],
            "stabilization": self.stabilization.to_dict(),
            "action_trivial": self.action_trivial,
        }
        if matrices:
            out["transitions"] = [[list(row) for row in t.matrix] for t in self.transitions]
        return out


class _LevelChain:
    """Cohomology of one family of complexes over r = 0..R at fixed s."""

    def __init__(self, descriptor, rel, s, R, degrees, executor=None):
        self.descriptor = descriptor
        self.rel = rel
        self.s = s
        self.R = R
        self.degrees = tuple(degrees)
        jobs = [(descriptor, rel, r, s, self.degrees) for r in range(R + 1)]
        self.results = _map(executor, _level_job, jobs)
        self.steps = persistence_steps(descriptor.tower, R)
        self._complexes = {}
        self._depths = {}

    def complex(self, r):
        if r not in self._complexes:
            self._complexes[r] = _build(self.descriptor, self.rel, r, self.s)
        return self._complexes[r]

    def result(self, r, n):
        return self.results[r][self.degrees.index(n)]

    def lift_depth(self, r, n):
        """Largest b with Z/p^b in the torsion of the integral H^{n+1} at level r."""
        if (r, n) not in self._depths:
            form = smith_normal_form(self.complex(r).integral_differential(n),
                                     certificates=False)
            p = self.descriptor.tower.p
            self._depths[(r, n)] = max((multiplicity(p, abs(d)) for d in form.diagonal),
                                       default=0)
        return self._depths[(r, n)]

    def colimit(self, n, check_action=True):
        p = self.descriptor.tower.p
        levels = tuple(self.result(r, n) for r in range(self.R + 1))
        transitions = tuple(
            induced_map(cochain_inclusion(self.complex(r), self.complex(r + 1)), n,
                        source=levels[r], target=levels[r + 1], check=False)
            for r in range(self.R))
        exps = [h.factors for h in levels]
        stabilization, comp = find_stabilization([t.matrix for t in transitions], exps, p,
                                                 self.steps, n)
        action = None
        if stabilization.certified and check_action:
            action = self._action_trivial(n, stabilization, comp, levels)
        if not stabilization.certified:
            logger.warning("H^%d at s=%d did not stabilize by R=%d", n, self.s, self.R)
        return ColimitApproximation(n, p, self.s, levels, transitions, stabilization, action)

    def _action_trivial(self, n, stabilization, comp, levels):
        t = stabilization.r0 + stabilization.lookahead
        tower = self.descriptor.tower
        target = levels[t]
        image = comp[(stabilization.r0, t)]
        p = tower.p
        for h in tower.generators(t):
            deck = induced_map(deck_translation(self.complex(t), h), n,
                               source=target, target=target, check=False)
            moved = abelian.subtract(abelian.compose([list(r) for r in deck.matrix], image),
                                     image)
            if not abelian.is_zero(moved, target.factors, p):
                return False
        return True


def _component_descriptors(descriptor, rel):
    parts = components(descriptor.complex)
    if len(parts) <= 1:
        return [(descriptor, rel)]
    out = []
    for piece, maps in parts:
        sub = restrict_descriptor(descriptor, piece, maps)
        piece_rel = None
        if rel is not None:
            selected = {}
            for n, old in enumerate(maps[:piece.dim + 1]):
                new = [i for i, c in enumerate(old) if rel.contains(n, c)]
                if new:
                    selected[n] = new
            piece_rel = Subcomplex.from_cells(piece, selected)
        out.append((sub, piece_rel))
    return out


def colimit(descriptor, rel=None, n=0, s=1, R=None, executor=None):
    R = descriptor.tower.depth if R is None else R
    _check_depth(descriptor, R)
    pieces = _component_descriptors(descriptor, rel)
    if len(pieces) == 1:
        return _LevelChain(descriptor, rel, s, R, (n,), executor).colimit(n)
    raise InputError("colimit of a disconnected complex: use completed_cohomology")


def _check_depth(descriptor, R):
    if R > descriptor.tower.depth:
        raise TowerError("R={} exceeds tower depth {}".format(R, descriptor.tower.depth),
                         level=R)
    if R < 0:
        raise TowerError("R must be non-negative")


def liftable_image(chains, approximation, S):
    """Cyclic type of the classes of a certified level-s colimit that lift to all precisions.

    ``chains`` maps each precision 1..S to the _LevelChain of the same complex.  The colimit is
    read as the image of A_r in A_R with r = R - k; its liftable part is the image of the
    reduction from precision s + b at level r, which needs s + b <= S.
    """
    if not approximation.certified:
        return None
    if not approximation.value:
        return ()
    n, s = approximation.degree, approximation.s
    chain = chains[s]
    R = chain.R
    r = R - approximation.stabilization.lookahead
    b = chain.lift_depth(r, n)
    if b == 0:
        return approximation.value
    if s + b > S:
        logger.info("H^%d at s=%d: lifting needs precision %d > S=%d", n, s, s + b, S)
        return None
    upper = chains[s + b]
    reduction = induced_map(precision_reduction(upper.complex(r), chain.complex(r)), n,
                            source=upper.result(r, n), target=chain.result(r, n), check=False)
    p = approximation.p
    comp = composite_maps([t.matrix for t in approximation.transitions],
                          [h.factors for h in approximation.levels], p)
    lifted = abelian.compose(comp[(r, R)], [list(row) for row in reduction.matrix])
    return abelian.image_type(lifted, approximation.levels[R].factors, p)


def reconstruct(values, S):
    """(free rank, torsion exponents, confidence) from the per-precision liftable values."""
    certified = [(s, v) for s, v in zip(range(1, S + 1), values) if v is not None]
    if not certified:
        return None, (), CONFIDENCE_NONE
    s_max, top = certified[-1]
    free = sum(1 for e in top if e == s_max)
    torsion = tuple(sorted((e for e in top if e < s_max), reverse=True))
    expected = [None] * free + list(torsion)
    for s, v in certified:
        if tuple(sorted(v, reverse=True)) != abelian.reduce_type(expected, s):
            logger.warning("reconstruction disagrees with the value at s=%d", s)
            return free, torsion, CONFIDENCE_INCONSISTENT
    if len(certified) == S:
        return free, torsion, CONFIDENCE_CERTIFIED
    return free, torsion, CONFIDENCE_PARTIAL


def describe_module(free, torsion, p):
    if free is None:
        return "?"
    parts = []
    if free:
        parts.append("Z_{}".format(p) + ("^{}".format(free) if free > 1 else ""))
    parts.extend("Z/{}".format(p ** b) for b in torsion)
    return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    values: Tuple[Optional[Tuple[int, ...]], ...]
    liftable: Tuple[Optional[Tuple[int, ...]], ...]
    colimits: Tuple[Tuple[ColimitApproximation, ...], ...]
    free_rank: Optional[int]
    torsion: Tuple[int, ...]
    confidence: str
    action_trivial: Optional[bool]

    @property
    def certified(self):
        return self.confidence == CONFIDENCE_CERTIFIED

    @property
    def rational_rank(self):
        return self.free_rank

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def describe(self, p):
        return describe_module(self.free_rank, self.torsion, p)

    def to_dict(self, p, matrices=True):
        return {
            "degree": self.degree,
            "values": [list(v) if v is not None else None for v in self.values],
            "liftable": [list(v) if v is not None else None for v in self.liftable],
            "reconstruction": {"free_rank": self.free_rank, "torsion": list(self.torsion),
                               "text": self.describe(p)},
            "qp_rank": self.free_rank,
            "confidence": self.confidence,
            "action_trivial": self.action_trivial,
            "colimits": [[c.to_dict(matrices) for c in per_s] for per_s in self.colimits],
        }


@dataclass(frozen=True)
class CompletedReport:
    p: int
    S: int
    R: int
    relative: bool
    components: int
    degrees: Tuple[DegreeReport, ...]

    def degree(self, n):
        for d in self.degrees:
            if d.degree == n:
                return d
        raise KeyError(n)

    def qp_report(self):
        return {d.degree: d.rational_rank for d in self.degrees}

    def to_dict(self, matrices=True):
        return {"p": self.p, "S": self.S, "R": self.R, "relative": self.relative,
                "components": self.components,
                "degrees": [d.to_dict(self.p, matrices) for d in self.degrees]}


def _sum_types(parts):
    if any(part is None for part in parts):
        return None
    return tuple(sorted((e for part in parts for e in part), reverse=True))


def completed_cohomology(descriptor, rel=None, degrees=None, S=1, R=None, executor=None):
    """Per-degree colimits for s = 1..S, assembled over components, then reconstructed."""
    ensure_descriptor(descriptor)
    R = descriptor.tower.depth if R is None else R
    _check_depth(descriptor, R)
    complex_ = descriptor.complex
    p = descriptor.tower.p
    if complex_.is_empty():
        return CompletedReport(p, S, R, rel is not None, 0, ())
    degrees = tuple(range(complex_.dim + 1)) if degrees is None else tuple(degrees)
    pieces = _component_descriptors(descriptor, rel)
    chains = {}
    for c, (piece, piece_rel) in enumerate(pieces):
        chains[c] = {s: _LevelChain(piece, piece_rel, s, R, degrees, executor)
                     for s in range(1, S + 1)}
    reports = []
    for n in degrees:
        values = []
        liftable = []
        colimits = []
        action = True
        for s in range(1, S + 1):
            per_piece = tuple(chains[c][s].colimit(n) for c in range(len(pieces)))
            colimits.append(per_piece)
            values.append(_sum_types([cl.value if cl.certified else None
                                      for cl in per_piece]))
            liftable.append(_sum_types([liftable_image(chains[c], cl, S)
                                        for c, cl in enumerate(per_piece)]))
            if values[-1] is not None and any(cl.action_trivial is False for cl in per_piece):
                action = False
        free, torsion, confidence = reconstruct(liftable, S)
        if confidence == CONFIDENCE_NONE:
            action = None
        logger.info("degree %d: %s (%s)", n, describe_module(free, torsion, p), confidence)
        reports.append(DegreeReport(n, tuple(values), tuple(liftable), tuple(colimits), free,
                                    torsion, confidence, action))
    return CompletedReport(p, S, R, rel is not None, len(pieces), tuple(reports))


@dataclass(frozen=True)
class LesJoint:
    level: int
    position: str
    order: int
    incoming_image: int
    outgoing_image: int
    composite_zero: bool

    @property
    def exact(self):
        return self.composite_zero and self.incoming_image + self.outgoing_image == self.order

    def to_dict(self):
        return {"level": self.level, "position": self.position, "order": self.order,
                "incoming_image": self.incoming_image, "outgoing_image": self.outgoing_image,
                "composite_zero": self.composite_zero, "exact": self.exact}


@dataclass(frozen=True)
class LesReport:
    relative: Dict[int, ColimitApproximation]
    absolute: Dict[int, ColimitApproximation]
    boundary: Dict[int, ColimitApproximation]
    connecting: Dict[Tuple[int, int], Tuple[Tuple[int, ...], ...]]
    joints: Tuple[LesJoint, ...]
    alternating: Tuple[int, ...]

    @property
    def exact(self):
        return all(j.exact for j in self.joints) and not any(self.alternating)

    def first_failure(self):
        return next((j for j in self.joints if not j.exact), None)

    def to_dict(self, matrices=True):
        return {
            "exact": self.exact,
            "alternating_sums": list(self.alternating),
            "joints": [j.to_dict() for j in self.joints],
            "relative": {n: c.to_dict(matrices) for n, c in sorted(self.relative.items())},
            "absolute": {n: c.to_dict(matrices) for n, c in sorted(self.absolute.items())},
            "boundary": {n: c.to_dict(matrices) for n, c in sorted(self.boundary.items())},
        }


def _pair_level_job(job):
    descriptor, Z, r, s = job
    seq = pair_sequence(descriptor, Z, r, s)
    top = len(seq.absolute.support)
    rel = tuple(cohomology(seq.relative, n) for n in range(top))
    abs_ = tuple(cohomology(seq.absolute, n) for n in range(top))
    bnd = tuple(cohomology(seq.boundary, n) for n in range(top))
    return rel, abs_, bnd


def les_check(descriptor, Z, degrees=None, s=1, R=None, executor=None):
    """Exactness of the pair sequence at every level, plus the three colimits."""
    ensure_descriptor(descriptor)
    report = Z.validate(descriptor.complex)
    if not report.ok:
        raise DescriptorError(report.message)
    R = descriptor.tower.depth if R is None else R
    _check_depth(descriptor, R)
    complex_ = descriptor.complex
    p = descriptor.tower.p
    top = complex_.dim + 1
    steps = persistence_steps(descriptor.tower, R)
    degrees = tuple(range(top)) if degrees is None else tuple(degrees)
    results = _map(executor, _pair_level_job, [(descriptor, Z, r, s) for r in range(R + 1)])
    joints = []
    alternating = []
    connecting = {}
    sequences = {}
    for r in range(R + 1):
        seq = pair_sequence(descriptor, Z, r, s)
        sequences[r] = seq
        rel, abs_, bnd = results[r]
        objects = []
        maps = []
        for n in range(top):
            j = induced_map(seq.inclusion, n, source=rel[n], target=abs_[n], check=False)
            i = induced_map(seq.restriction, n, source=abs_[n], target=bnd[n], check=False)
            objects += [("H^{}(Y,Z)".format(n), rel[n]), ("H^{}(Y)".format(n), abs_[n]),
                        ("H^{}(Z)".format(n), bnd[n])]
            maps += [j.matrix, i.matrix]
            if n + 1 < top:
                delta = seq.connecting[n]
                columns = [rel[n + 1].project(delta.apply(g)) for g in bnd[n].generators]
                matrix = tuple(tuple(col[k] for col in columns)
                               for k in range(len(rel[n + 1].factors)))
                connecting[(r, n)] = matrix
                maps.append(matrix)
        total = 0
        for t, (name, group) in enumerate(objects):
            f = maps[t - 1] if t > 0 else None
            g = maps[t] if t < len(maps) else None
            prev = objects[t - 1][1] if t > 0 else None
            nxt = objects[t + 1][1] if t + 1 < len(objects) else None
            incoming = (abelian.image_exponent([list(row) for row in f], group.factors, p)
                        if f is not None else 0)
            outgoing = (abelian.image_exponent([list(row) for row in g], nxt.factors, p)
                        if g is not None else 0)
            zero = True
            if f is not None and g is not None:
                product = abelian.compose([list(row) for row in g], [list(row) for row in f])
                zero = abelian.is_zero(product, nxt.factors, p) if product else True
            joints.append(LesJoint(r, name, group.order_exponent, incoming, outgoing, zero))
            total += (-1) ** t * group.order_exponent
        alternating.append(total)
    chains = {"relative": {}, "absolute": {}, "boundary": {}}
    for n in degrees:
        for key, index in (("relative", 0), ("absolute", 1), ("boundary", 2)):
            levels = tuple(results[r][index][n] if n < top else None for r in range(R + 1))
            if any(h is None for h in levels):
                continue
            complexes = [getattr(sequences[r], key) for r in range(R + 1)]
            transitions = tuple(
                induced_map(cochain_inclusion(complexes[r], complexes[r + 1]), n,
                            source=levels[r], target=levels[r + 1], check=False)
                for r in range(R))
            stabilization, _ = find_stabilization([t.matrix for t in transitions],
                                                  [h.factors for h in levels], p,
                                                  steps, n)
            chains[key][n] = ColimitApproximation(n, p, s, levels, transitions, stabilization)
    les = LesReport(chains["relative"], chains["absolute"], chains["boundary"], connecting,
                    tuple(joints), tuple(alternating))
    if les.exact:
        logger.info("long exact sequence exact at every level up to R=%d", R)
    else:
        logger.warning("long exact sequence fails at %s", les.first_failure())
    return les


@dataclass(frozen=True)
class ExciseEntry:
    degree: int
    level: int
    s: int
    full: Tuple[int, ...]
    reduced: Tuple[int, ...]
    index: int

    @property
    def ok(self):
        return tuple(sorted(self.full)) == tuple(sorted(self.reduced * self.index))

    def to_dict(self):
        return {"degree": self.degree, "level": self.level, "s": self.s,
                "full": list(self.full), "reduced": list(self.reduced), "index": self.index,
                "ok": self.ok}


@dataclass(frozen=True)
class ExciseResult:
    subtower: object
    reduced: FlatDescriptor
    certificate: Tuple[ExciseEntry, ...]

    @property
    def certified(self):
        return all(e.ok for e in self.certificate)

    def to_dict(self):
        return {"indices": [self.subtower.index(r) for r in range(len(self.subtower.subgroups))],
                "certified": self.certified,
                "certificate": [e.to_dict() for e in self.certificate]}


def excise_reduce(descriptor, degrees=None, levels=None, precisions=(1,), executor=None):
    """Replace G by the closure H of the labels and certify the induction isomorphism."""
    ensure_descriptor(descriptor)
    tower = descriptor.tower
    sub = closure_of(tower, list(descriptor.labels))
    reduced = FlatDescriptor(descriptor.complex, SubgroupTower(sub), descriptor.labels)
    degrees = tuple(range(descriptor.complex.dim + 1)) if degrees is None else tuple(degrees)
    levels = tuple(range(tower.depth + 1)) if levels is None else tuple(levels)
    grid = [(r, s) for s in precisions for r in levels]
    full = _map(executor, _level_job, [(descriptor, None, r, s, degrees) for r, s in grid])
    small = _map(executor, _level_job, [(reduced, None, r, s, degrees) for r, s in grid])
    entries = []
    for (r, s), big, little in zip(grid, full, small):
        for n, a, b in zip(degrees, big, little):
            entries.append(ExciseEntry(n, r, s, a.invariants, b.invariants, sub.index(r)))
    result = ExciseResult(sub, reduced, tuple(entries))
    if not result.certified:
        logger.warning("excision certificate fails")
    return result


@dataclass(frozen=True)
class NilpotentVerdict:
    equal: bool
    compared: Tuple[Tuple[int, str, str, bool], ...]
    skipped: Tuple[int, ...]
    total: CompletedReport
    quotient: CompletedReport

    def to_dict(self, matrices=False):
        return {"equal": self.equal,
                "compared": [{"degree": n, "total": a, "quotient": b, "equal": e}
                             for n, a, b, e in self.compared],
                "skipped": list(self.skipped),
                "total": self.total.to_dict(matrices),
                "quotient": self.quotient.to_dict(matrices)}


def nilpotent_collapse_check(descriptor, normal, quotient_descriptor, degrees=None, S=1,
                             R=None, executor=None):
    """Compare the completed cohomology of the total space with that of the quotient."""
    normal.check_normal()
    qtower = quotient_descriptor.tower
    if not isinstance(qtower, QuotientTower) or qtower.parent is not descriptor.tower:
        raise InputError("quotient descriptor must take values in the quotient tower")
    if qtower.normal.subgroups != normal.subgroups:
        raise InputError("quotient descriptor uses a different normal subtower")
    top = max(descriptor.complex.dim, quotient_descriptor.complex.dim)
    degrees = tuple(range(top + 1)) if degrees is None else tuple(degrees)
    total = completed_cohomology(descriptor, None, degrees, S, R, executor)
    quotient = completed_cohomology(quotient_descriptor, None, degrees, S, R, executor)
    compared = []
    skipped = []
    p = descriptor.tower.p
    for n in degrees:
        a, b = total.degree(n), quotient.degree(n)
        if a.certified and b.certified:
            same = (a.free_rank, a.torsion) == (b.free_rank, b.torsion)
            compared.append((n, a.describe(p), b.describe(p), same))
        else:
            skipped.append(n)
    equal = all(item[3] for item in compared)
    return NilpotentVerdict(equal, tuple(compared), tuple(skipped), total, quotient)


@dataclass(frozen=True)
class DefectEstimate:
    defect: int
    lower_bound: bool
    algebraic: int
    report: CompletedReport
    index: Tuple[int, ...]

    @property
    def agrees(self):
        return self.defect == self.algebraic

    def to_dict(self, matrices=False):
        return {"defect": self.defect, "lower_bound": self.lower_bound,
                "algebraic": self.algebraic, "agrees": self.agrees,
                "closure_index": list(self.index), "report": self.report.to_dict(matrices)}


def label_rank(descriptor, edges, R):
    """Rank over Z_p, read off at precision p^R, of the abelian labels of ``edges``."""
    tower = descriptor.tower
    base = tower.parent if isinstance(tower, SubgroupTower) else tower
    if not isinstance(base, AbelianTower):
        raise InputError("defect estimates need an abelian tower")
    if R < 1:
        return 0
    p = tower.p
    data = {}
    for j, e in enumerate(edges):
        for i, v in enumerate(descriptor.labels[e].images[R]):
            if v:
                data[(i, j)] = v
    elimination = local_smith(SparseMatrix(base.rank, len(edges), data, p ** R), p, R)
    return elimination.rank


def first_betti_number(complex_):
    d0 = constant_complex(complex_, 2, 1).integral_differential(0)
    d1 = constant_complex(complex_, 2, 1).integral_differential(1)
    return complex_.count(1) - smith_normal_form(d0, False).rank - smith_normal_form(d1, False).rank


def defect_estimate(descriptor, generators=None, S=1, R=None, executor=None):
    """Largest degree with nonzero completed cohomology, against rank ker(Z_p^N -> G)."""
    ensure_descriptor(descriptor)
    R = descriptor.tower.depth if R is None else R
    complex_ = descriptor.complex
    excised = excise_reduce(descriptor, levels=(), precisions=())
    report = completed_cohomology(excised.reduced, None, None, S, R, executor)
    nonzero = [d.degree for d in report.degrees if d.free_rank or d.torsion]
    lower_bound = any(d.confidence != CONFIDENCE_CERTIFIED for d in report.degrees)
    defect = max(nonzero) if nonzero else 0
    if generators is None:
        edges = list(range(complex_.count(1)))
        rank_source = first_betti_number(complex_)
    else:
        edges = [complex_.index_of(1, g) if isinstance(g, str) else g for g in generators]
        rank_source = len(edges)
    algebraic = rank_source - label_rank(descriptor, edges, R)
    if lower_bound:
        logger.warning("defect estimate %d is a lower bound: some degrees did not stabilize",
                       defect)
    result = DefectEstimate(defect, lower_bound, algebraic, report,
                            tuple(excised.subtower.index(r) for r in range(R + 1)))
    logger.info("defect %d (algebraic %d)", defect, algebraic)
    return result


@dataclass(frozen=True)
class TransferReport:
    applicable: bool
    reason: str
    entries: Tuple[Tuple[int, int, int, int], ...]

    @property
    def ok(self):
        return self.applicable and all(v == expected for (_, _, v, expected) in self.entries)

    def to_dict(self):
        return {"applicable": self.applicable, "reason": self.reason, "ok": self.ok,
                "entries": [{"level": r, "index": i, "valuation": v, "expected": e}
                            for r, i, v, e in self.entries]}


def transfer_check(descriptor, s=2, R=None, executor=None):
    """Top-degree transition maps act as multiplication by the index of the level step."""
    ensure_descriptor(descriptor)
    tower = descriptor.tower
    R = tower.depth if R is None else R
    complex_ = descriptor.complex
    if len(components(complex_)) != 1:
        return TransferReport(False, "complex is not connected", ())
    if not descriptor.is_dense(R):
        return TransferReport(False, "labels are not dense up to level {}".format(R), ())
    d = complex_.dim
    chain = _LevelChain(descriptor, None, s, R, (d,), executor)
    p = tower.p
    entries = []
    for r in range(R):
        source, target = chain.result(r, d), chain.result(r + 1, d)
        if source.factors != (s,) or target.factors != (s,):
            return TransferReport(False, "top cohomology is not cyclic of order p^s", ())
        step = induced_map(cochain_inclusion(chain.complex(r), chain.complex(r + 1)), d,
                           source=source, target=target, check=False)
        index = tower.order(r + 1) // tower.order(r)
        v = valuation(step.matrix[0][0] % p ** s, p, s)
        entries.append((r, index, v, min(multiplicity(p, index), s)))
    return TransferReport(True, "", tuple(entries))


@dataclass(frozen=True)
class ShapiroReport:
    level: int
    s: int
    entries: Tuple[Tuple[int, Tuple[int, ...], Tuple[int, ...]], ...]

    @property
    def ok(self):
        return all(a == b for (_, a, b) in self.entries)

    def to_dict(self):
        return {"level": self.level, "s": self.s, "ok": self.ok,
                "entries": [{"degree": n, "twisted": list(a), "cover": list(b)}
                            for n, a, b in self.entries]}


def shapiro_check(descriptor, r, s):
    """Twisted cohomology of the base against constant cohomology of the cover."""
    ensure_descriptor(descriptor)
    twisted = twisted_complex(descriptor, r=r, s=s)
    cover = build_cover(descriptor.complex, descriptor, r)
    plain = constant_complex(cover.complex, descriptor.tower.p, s)
    entries = tuple((a.degree, a.invariants, b.invariants)
                    for a, b in zip(all_cohomology(twisted), all_cohomology(plain)))
    report = ShapiroReport(r, s, entries)
    if not report.ok:
        logger.warning("twisted and cover cohomology differ at level %d", r)
    return report
