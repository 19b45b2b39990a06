#!/usr/bin/env python3
"""
Tests for the open-star cover and its comparison with cellular cohomology.
"""

import itertools
import os
import sys
import unittest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from completedcoh import library
from completedcoh.cech_compare import (CechComplex, cech_cohomology, compare_with_cellular,
                                       star_cover)
from completedcoh.complex_core import DeltaComplex, Subcomplex, simplicial_model
from completedcoh.errors import NotSimplicialError


def closed_simplicial(vertices, top):
    """Delta-complex of the simplicial complex generated by the given vertex tuples."""
    simplices = set()
    for simplex in top:
        simplex = tuple(sorted(simplex))
        for k in range(1, len(simplex) + 1):
            simplices.update(itertools.combinations(simplex, k))
    dim = max(len(s) for s in simplices) - 1
    by_dim = [sorted(s for s in simplices if len(s) == n + 1) for n in range(dim + 1)]
    index = [{s: i for i, s in enumerate(level)} for level in by_dim]
    higher = []
    for n in range(1, dim + 1):
        higher.append([tuple(index[n - 1][s[:k] + s[k + 1:]] for k in range(n + 1))
                       for s in by_dim[n]])
    return DeltaComplex.build(vertices, *higher)


def sphere():
    return closed_simplicial(4, itertools.combinations(range(4), 3))


def strict_examples():
    """Ten strict simplicial complexes."""
    return {
        "hollow_triangle": library.hollow_triangle(),
        "solid_triangle": library.solid_triangle(),
        "sphere": sphere(),
        "solid_tetrahedron": closed_simplicial(4, [range(4)]),
        "two_triangles": closed_simplicial(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]),
        "circle": simplicial_model(library.circle()),
        "wedge": simplicial_model(library.wedge_of_circles(2)),
        "torus": simplicial_model(library.torus()),
        "klein_bottle": simplicial_model(library.klein_bottle()[0]),
        "cylinder": simplicial_model(library.cylinder()),
    }


class TestStarCover(unittest.TestCase):
    """Intersections of open stars."""

    def test_nerve_of_hollow_triangle(self):
        cover = star_cover(library.hollow_triangle())
        self.assertEqual(cover.size, 3)
        self.assertEqual(cover.nerve(1), ((0, 1), (0, 2), (1, 2)))
        self.assertFalse(cover.is_nonempty((0, 1, 2)))
        self.assertTrue(cover.nerve_matches_complex())

    def test_intersection_cells(self):
        """The stars of v0 and v1 in the solid triangle meet in the open edge and triangle."""
        cover = star_cover(library.solid_triangle())
        self.assertEqual(set(cover.intersection((1, 0))), {(1, 0), (2, 0)})

    def test_non_strict_complex_rejected(self):
        with self.assertRaises(NotSimplicialError):
            star_cover(library.circle())
        with self.assertRaises(NotSimplicialError):
            cech_cohomology(library.torus())


class TestAbsoluteComparison(unittest.TestCase):
    """Cech cohomology of the star cover equals cellular cohomology."""

    def test_ten_strict_examples(self):
        for name, complex_ in strict_examples().items():
            for p, s in ((2, 1), (3, 2)):
                with self.subTest(name=name, p=p, s=s):
                    self.assertTrue(star_cover(complex_).nerve_matches_complex())
                    self.assertTrue(compare_with_cellular(complex_, p=p, s=s).agree)

    def test_sphere_values(self):
        values = [h.invariants for h in cech_cohomology(sphere(), p=2, s=1)]
        self.assertEqual(values, [(1,), (), (1,)])

    def test_torus_values(self):
        values = [h.invariants for h in cech_cohomology(strict_examples()["torus"], p=3, s=1)]
        self.assertEqual(values, [(1,), (1, 1), (1,)])


class TestRelativeComparison(unittest.TestCase):
    """Cochains vanishing on every intersection that meets the subcomplex."""

    def test_hollow_triangle_rel_vertex(self):
        triangle = library.hollow_triangle()
        rel = Subcomplex.from_cells(triangle, {0: ["v0"]})
        result = compare_with_cellular(triangle, rel, p=2, s=2)
        self.assertTrue(result.agree)
        self.assertEqual([entry[1] for entry in result.entries], [(), (2,)])

    def test_disk_rel_boundary(self):
        triangle = library.solid_triangle()
        rel = Subcomplex.from_cells(triangle, {0: ["v0", "v1", "v2"],
                                               1: ["e01", "e02", "e12"]})
        cech = CechComplex(star_cover(triangle), 2, 1, rel)
        self.assertEqual(cech.dims, (0, 0, 1))
        result = compare_with_cellular(triangle, rel, p=2, s=1)
        self.assertTrue(result.agree)
        self.assertEqual(result.entries[2][1], (1,))

    def test_sphere_rel_edge(self):
        complex_ = sphere()
        rel = Subcomplex.from_cells(complex_, {0: [0, 1], 1: [0]})
        self.assertTrue(compare_with_cellular(complex_, rel, p=2, s=1).agree)

    def test_to_dict(self):
        result = compare_with_cellular(library.hollow_triangle(), p=2, s=1)
        self.assertEqual(result.to_dict()["entries"][1], {"degree": 1, "cech": [1],
                                                         "cellular": [1]})


if __name__ == "__main__":
    unittest.main(verbosity=2)
