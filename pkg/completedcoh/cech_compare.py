"""Cech cohomology of the open-star cover, compared with cellular cohomology.

The cover has one open star per vertex.  The intersection of the stars of a vertex tuple is
the union of the open cells whose vertex set contains the tuple; it is nonempty exactly
when the tuple spans a simplex.  Only strict simplicial complexes are accepted.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

from .complex_core import DeltaComplex, strictness
from .errors import NotSimplicialError
from .local_systems import constant_complex
from .smith_engine import CochainComplex, SparseMatrix, cohomology

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StarCover:
    complex: DeltaComplex
    # tuple of sorted vertices -> cells (n, index) whose vertex set contains it
    intersections: Dict[Tuple[int, ...], Tuple[Tuple[int, int], ...]]

    @property
    def size(self):
        return self.complex.count(0)

    def intersection(self, vertices):
        return self.intersections.get(tuple(sorted(vertices)), ())

    def is_nonempty(self, vertices):
        return bool(self.intersection(vertices))

    def nerve(self, n):
        """Vertex tuples of length n + 1 with nonempty intersection, sorted."""
        return tuple(sorted(t for t in self.intersections if len(t) == n + 1))

    def nerve_matches_complex(self):
        for n in range(self.complex.dim + 1):
            spanned = {tuple(sorted(self.complex.cell_vertices(n, i)))
                       for i in range(self.complex.count(n))}
            if spanned != set(self.nerve(n)):
                return False
        return True

    def meets(self, vertices, rel):
        """Whether the intersection of the stars meets the closed subcomplex ``rel``."""
        return any(rel.contains(n, i) for n, i in self.intersection(vertices))


def star_cover(complex_):
    report = strictness(complex_)
    if not report.ok:
        raise NotSimplicialError(
            "star covers need a strict simplicial complex ({}); subdivide first".format(
                report.message),
            dimension=report.location[0] if report.location else None,
            cell=report.location[1] if report.location else None)
    table = {}
    for n in range(complex_.dim + 1):
        for i in range(complex_.count(n)):
            vertices = sorted(set(complex_.cell_vertices(n, i)))
            for k in range(1, len(vertices) + 1):
                for subset in itertools.combinations(vertices, k):
                    table.setdefault(subset, []).append((n, i))
    return StarCover(complex_, {t: tuple(cells) for t, cells in table.items()})


class CechComplex(CochainComplex):
    """Alternating Cech cochains of the star cover with constant Z/p^s coefficients.

    With ``rel`` the presheaf vanishes on every intersection meeting the subcomplex.
    """

    def __init__(self, cover, p, s, rel=None):
        self.cover = cover
        self.rel = rel
        support = []
        for n in range(cover.complex.dim + 1):
            support.append(tuple(t for t in cover.nerve(n)
                                 if rel is None or not cover.meets(t, rel)))
        self.support = tuple(support)
        positions = [{t: i for i, t in enumerate(cells)} for cells in support]
        differentials = []
        for n in range(len(support) - 1):
            data = {}
            for row, sigma in enumerate(support[n + 1]):
                for k in range(len(sigma)):
                    column = positions[n].get(sigma[:k] + sigma[k + 1:])
                    if column is not None:
                        data[(row, column)] = -1 if k % 2 else 1
            differentials.append(SparseMatrix(len(support[n + 1]), len(support[n]), data))
        super().__init__(p, s, [len(cells) for cells in support], differentials)


def cech_cohomology(complex_, rel=None, p=2, s=1):
    """H^n of the Cech complex of the star cover in every degree 0..dim."""
    cech = CechComplex(star_cover(complex_), p, s, rel)
    return tuple(cohomology(cech, n) for n in range(complex_.dim + 1))


@dataclass(frozen=True)
class CechComparison:
    entries: Tuple[Tuple[int, Tuple[int, ...], Tuple[int, ...]], ...]

    @property
    def agree(self):
        return all(a == b for _, a, b in self.entries)

    def to_dict(self):
        return {"agree": self.agree,
                "entries": [{"degree": n, "cech": list(a), "cellular": list(b)}
                            for n, a, b in self.entries]}


def compare_with_cellular(complex_, rel=None, p=2, s=1):
    cech = cech_cohomology(complex_, rel, p, s)
    cellular = constant_complex(complex_, p, s, rel)
    entries = tuple((n, h.invariants, cohomology(cellular, n).invariants)
                    for n, h in enumerate(cech))
    result = CechComparison(entries)
    if result.agree:
        logger.info("Cech and cellular cohomology agree in degrees 0..%d", complex_.dim)
    else:
        logger.warning("Cech and cellular cohomology differ: %s", entries)
    return result
