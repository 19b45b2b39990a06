#!/usr/bin/env python3
"""
Tests for Delta-complexes, subcomplexes, covers and the complex text grammar.
"""

import os
import sys
import unittest

# Add parent directory to path for local testing
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from completedcoh import library
from completedcoh.complex_core import (DeltaComplex, Subcomplex, barycentric_subdivision,
                                       build_cover, components, cover_projection,
                                       euler_characteristic, format_complex, parse_complex,
                                       restrict, simplicial_model, strictness,
                                       validate_complex)
from completedcoh.errors import ComplexError, ConfigError
from completedcoh.group_towers import AbelianTower, HeisenbergTower
from completedcoh.local_systems import FlatDescriptor


class TestDeltaComplex(unittest.TestCase):
    """Face bookkeeping and validation."""

    def test_circle_counts(self):
        """The circle has one vertex and one loop edge."""
        circle = library.circle()
        self.assertEqual(circle.cells_per_dim, (1, 1))
        self.assertEqual(circle.dim, 1)
        self.assertEqual(euler_characteristic(circle), 0)

    def test_torus_is_valid(self):
        """The two-triangle torus satisfies the face identities."""
        torus = library.torus()
        self.assertTrue(validate_complex(torus).ok)
        self.assertEqual(torus.cells_per_dim, (1, 3, 2))
        self.assertEqual(torus.euler_characteristic(), 0)

    def test_edge_01_and_vertices(self):
        """Triangle faces are [e12, e02, e01]; edge_01 picks the last one."""
        tri = library.solid_triangle()
        self.assertEqual(tri.edge_01(2, 0), tri.index_of(1, "e01"))
        self.assertEqual(tri.cell_vertices(2, 0), (0, 1, 2))
        self.assertEqual(tri.cell_vertices(1, tri.index_of(1, "e12")), (1, 2))

    def test_broken_face_identity_reported(self):
        """A 2-cell whose edges do not meet consistently is rejected with its location."""
        bad = DeltaComplex.build(3, [(1, 0), (2, 0), (2, 1)], [(0, 1, 2)])
        report = validate_complex(bad)
        self.assertFalse(report.ok)
        self.assertEqual(report.location[:2], (2, 0))

    def test_missing_face_reference(self):
        report = validate_complex(DeltaComplex.build(1, [(0, 3)]))
        self.assertFalse(report.ok)
        self.assertIn("missing", report.message)

    def test_unknown_label(self):
        with self.assertRaises(ComplexError):
            library.torus().index_of(1, "nope")

    def test_library_3_manifolds(self):
        """T^3 and the nilmanifold have Euler characteristic 0 and one vertex."""
        torus3, _ = library.torus3()
        nil, elements = library.nilmanifold()
        self.assertEqual(euler_characteristic(torus3), 0)
        self.assertEqual(nil.cells_per_dim, (1, 7, 12, 6))
        self.assertEqual(set(elements), {"x", "y", "z", "xy", "xz", "xyz", "w"})
        self.assertEqual(elements["w"], (0, 1, -1))
        self.assertTrue(validate_complex(nil).ok)

    def test_klein_bottle(self):
        klein, elements = library.klein_bottle()
        self.assertEqual(klein.cells_per_dim, (1, 3, 2))

    def test_unknown_library_name(self):
        with self.assertRaises(ComplexError):
            library.library_complex("moebius_strip")
        self.assertEqual(library.library_complex("wedge3").cells_per_dim, (1, 3))


class TestSubcomplexAndComponents(unittest.TestCase):
    """Subcomplex closure and connected components."""

    def setUp(self):
        """Set up the cylinder and its boundary."""
        self.cylinder = library.cylinder()
        self.boundary = library.cylinder_boundary(self.cylinder)

    def test_boundary_is_closed(self):
        self.assertTrue(self.boundary.validate(self.cylinder).ok)
        self.assertEqual(self.boundary.complement(self.cylinder, 1),
                         (self.cylinder.index_of(1, "v"), self.cylinder.index_of(1, "d")))

    def test_unclosed_subcomplex(self):
        """An edge without its vertices is reported."""
        sub = Subcomplex.from_cells(self.cylinder, {1: ["bottom"]})
        self.assertFalse(sub.validate(self.cylinder).ok)

    def test_restrict_boundary(self):
        """The boundary of the cylinder is two disjoint circles."""
        circles, maps = restrict(self.cylinder, self.boundary)
        self.assertEqual(circles.cells_per_dim, (2, 2))
        self.assertEqual(len(components(circles)), 2)
        self.assertEqual(len(maps[1]), 2)

    def test_single_component(self):
        self.assertEqual(len(components(library.torus())), 1)


class TestCovers(unittest.TestCase):
    """Finite covers built from descriptors."""

    def setUp(self):
        """Set up the circle with the dense label 1 in Z/2^r."""
        self.tower = AbelianTower(1, 2, 3)
        self.circle = library.circle()
        self.descriptor = FlatDescriptor.from_values(self.circle, self.tower, {"e": 1})

    def test_dense_label_gives_connected_cover(self):
        """The level-r cover of the circle by a generator is a circle of length 2^r."""
        cover = build_cover(self.circle, self.descriptor, 3)
        self.assertEqual(cover.complex.cells_per_dim, (8, 8))
        self.assertEqual(len(components(cover.complex)), 1)
        self.assertTrue(validate_complex(cover.complex).ok)

    def test_zero_label_gives_disjoint_copies(self):
        descriptor = FlatDescriptor.from_values(self.circle, self.tower, {"e": 0})
        cover = build_cover(self.circle, descriptor, 2)
        self.assertEqual(len(components(cover.complex)), 4)

    def test_torus_cover_valid(self):
        tower = AbelianTower(2, 2, 2)
        torus = library.torus()
        descriptor = FlatDescriptor.from_values(torus, tower, library.TORUS_ELEMENTS)
        cover = build_cover(torus, descriptor, 2)
        self.assertTrue(validate_complex(cover.complex).ok)
        self.assertEqual(cover.complex.cells_per_dim, (16, 48, 32))

    def test_cover_projection_is_cellular(self):
        """Projecting level 2 to level 1 respects faces."""
        upper = build_cover(self.circle, self.descriptor, 2)
        lower = build_cover(self.circle, self.descriptor, 1)
        maps = cover_projection(upper, lower, self.descriptor)
        for e, faces in enumerate(upper.complex.faces[1]):
            image = lower.complex.faces[1][maps[1][e]]
            self.assertEqual(image, tuple(maps[0][f] for f in faces))

    def test_cover_euler_characteristic_scales(self):
        """chi(cover at level r) = |L_r| chi(base), here on the Klein bottle with chi = 0
        and on the wedge of two circles with chi = -1."""
        klein, elements = library.klein_bottle()
        wedge = library.wedge_of_circles(2)
        cases = [(klein, AbelianTower(1, 2, 2), {k: v[1] for k, v in elements.items()}),
                 (wedge, AbelianTower(2, 2, 2), None)]
        for base, tower, values in cases:
            if values is None:
                values = {base.label(1, 0): (1, 0), base.label(1, 1): (0, 1)}
            descriptor = FlatDescriptor.from_values(base, tower, values)
            for r in range(3):
                cover = build_cover(base, descriptor, r)
                self.assertEqual(euler_characteristic(cover.complex),
                                 tower.order(r) * euler_characteristic(base))

    def test_deck_action_is_free_and_transitive(self):
        """Right translation by h in L_1 permutes the Heisenberg cover cellwise; on each
        fibre it has no fixed points for h != 1 and the orbit of a cell is the fibre."""
        nil, elements = library.nilmanifold()
        tower = HeisenbergTower(2, 1)
        descriptor = FlatDescriptor.from_values(nil, tower, elements)
        cover = build_cover(nil, descriptor, 1)
        group = tower.level(1)
        moves = [group.right_translation(h) for h in range(group.order)]

        def move(n, index, right):
            sigma, x = cover.cell(n, index)
            return cover.index(sigma, right[x])

        for h, right in enumerate(moves):
            for n in range(1, nil.dim + 1):
                for index, faces in enumerate(cover.complex.faces[n]):
                    moved = cover.complex.faces[n][move(n, index, right)]
                    self.assertEqual(moved, tuple(move(n - 1, f, right) for f in faces))
            if h != group.identity:
                self.assertTrue(all(right[x] != x for x in range(group.order)))
        for x in range(group.order):
            self.assertEqual({right[x] for right in moves}, set(range(group.order)))


class TestSubdivisionAndStrictness(unittest.TestCase):
    """Strict simplicial models."""

    def test_triangle_is_strict(self):
        self.assertTrue(strictness(library.hollow_triangle()).ok)

    def test_circle_is_not_strict(self):
        self.assertFalse(strictness(library.circle()).ok)

    def test_subdivision_keeps_euler_characteristic(self):
        torus = library.torus()
        subdivided = barycentric_subdivision(torus)
        self.assertTrue(validate_complex(subdivided).ok)
        self.assertEqual(euler_characteristic(subdivided), 0)

    def test_simplicial_model_of_torus(self):
        model = simplicial_model(library.torus())
        self.assertTrue(strictness(model).ok)
        self.assertEqual(euler_characteristic(model), 0)

    def test_subdivision_refuses_dimension_three(self):
        with self.assertRaises(ComplexError):
            barycentric_subdivision(library.torus3()[0])


class TestComplexGrammar(unittest.TestCase):
    """The text format used by configs."""

    TEXT = """
dim 0
a
b
dim 1
bottom: a a
top: b b
v: b a
d: b a
dim 2
T1: v d bottom
T2: top d v
subcomplex
0: a b
1: bottom top
"""

    def test_parse_cylinder(self):
        """The inline cylinder matches the library cylinder."""
        complex_, sub = parse_complex(self.TEXT)
        self.assertEqual(complex_, library.cylinder())
        self.assertEqual(sub, library.cylinder_boundary())

    def test_format_round_trip(self):
        complex_, sub = parse_complex(self.TEXT)
        again, sub_again = parse_complex(format_complex(complex_, sub))
        self.assertEqual(again, complex_)
        self.assertEqual(sub_again, sub)

    def test_error_carries_line(self):
        """An edge with three faces is reported at its line."""
        with self.assertRaises(ConfigError) as ctx:
            parse_complex("dim 0\nv\ndim 1\ne: v v v\n")
        self.assertEqual(ctx.exception.line, 4)
        self.assertIn("line 4", str(ctx.exception))

    def test_unknown_face(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_complex("dim 0\nv\ndim 1\ne: v w\n", first_line=10)
        self.assertEqual(ctx.exception.line, 13)

    def test_count_vertices(self):
        complex_, sub = parse_complex("dim 0\ncount 3\n")
        self.assertEqual(complex_.cells_per_dim, (3,))
        self.assertIsNone(sub)


if __name__ == "__main__":
    unittest.main(verbosity=2)
