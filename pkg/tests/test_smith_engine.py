#!/usr/bin/env python3
"""
Tests for local Smith elimination, cohomology with generators and induced maps.
"""

import os
import random
import sys
import unittest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_smith_normal_form
from sympy.polys.domains import ZZ

from completedcoh import abelian, library
from completedcoh.errors import ChainMapError, InputError
from completedcoh.group_towers import AbelianTower, HeisenbergTower
from completedcoh.local_systems import (FlatDescriptor, cochain_inclusion, constant_complex,
                                        random_abelian_cocycle, twisted_complex)
from completedcoh.smith_engine import (CochainComplex, CochainMap, SparseMatrix, cohomology,
                                       cohomology_via_lift, dump_triplets, induced_map,
                                       load_triplets, local_smith, smith_normal_form,
                                       valuation)


def random_matrix(rng, rows, cols, bound=6, density=0.5):
    return [[rng.randint(-bound, bound) if rng.random() < density else 0 for _ in range(cols)]
            for _ in range(rows)]


def sympy_invariants(rows):
    """Nonzero invariant factors from sympy, as absolute values."""
    if not rows or not rows[0]:
        return []
    diagonal = sympy_smith_normal_form(Matrix(rows), domain=ZZ)
    size = min(diagonal.shape)
    return sorted(abs(int(diagonal[i, i])) for i in range(size) if diagonal[i, i] != 0)


class TestIntegralSmithForm(unittest.TestCase):
    """Integral Smith forms against sympy."""

    def setUp(self):
        self.rng = random.Random(20240611)

    def test_against_sympy(self):
        for _ in range(25):
            rows = random_matrix(self.rng, self.rng.randint(1, 6), self.rng.randint(1, 6))
            form = smith_normal_form(rows)
            self.assertEqual(sorted(form.diagonal), sympy_invariants(rows))

    def test_certificates(self):
        """U M V is the diagonal matrix."""
        rows = random_matrix(self.rng, 4, 5)
        form = smith_normal_form(rows)
        product = abelian.compose(abelian.compose([list(r) for r in form.U], rows),
                                  [list(r) for r in form.V])
        for i in range(4):
            for j in range(5):
                expected = form.diagonal[i] if i == j and i < form.rank else 0
                self.assertEqual(product[i][j], expected)

    def test_divisibility_chain(self):
        form = smith_normal_form([[2, 0], [0, 3]])
        self.assertEqual(form.diagonal, (1, 6))


class TestLocalSmith(unittest.TestCase):
    """Elimination over Z/p^s."""

    def setUp(self):
        self.rng = random.Random(5)

    def test_valuation(self):
        self.assertEqual(valuation(12, 2, 5), 2)
        self.assertEqual(valuation(0, 3, 4), 4)
        self.assertEqual(valuation(81, 3, 2), 2)

    def test_diagonal_matches_integral_form(self):
        """Pivot valuations are the p-parts of the integral invariants below p^s."""
        for p, s in ((2, 3), (3, 2), (5, 1)):
            for _ in range(10):
                rows = random_matrix(self.rng, 5, 4, bound=30)
                matrix = SparseMatrix.from_dense(rows, p ** s)
                expected = []
                for d in smith_normal_form(rows, certificates=False).diagonal:
                    v = valuation(d % p ** s, p, s)
                    if v < s:
                        expected.append(v)
                self.assertEqual(local_smith(matrix, p, s).diagonal(), tuple(sorted(expected)))

    def test_carry_shape_checked(self):
        matrix = SparseMatrix.identity(3, 8)
        with self.assertRaises(InputError):
            local_smith(matrix, 2, 3, carry=SparseMatrix.identity(2, 8))

    def test_triplet_format(self):
        matrix = SparseMatrix(3, 4, {(0, 1): 5, (2, 3): 7}, 9)
        text = dump_triplets(matrix)
        self.assertTrue(text.startswith("% 3 4 9"))
        self.assertEqual(load_triplets(text), matrix)
        with self.assertRaises(InputError):
            load_triplets("0 1 2\n")


class TestCohomology(unittest.TestCase):
    """Cohomology of standard complexes over Z/p^s."""

    def test_nilmanifold_betti_numbers(self):
        """The Heisenberg nilmanifold has mod-p Betti numbers 1, 2, 2, 1."""
        nil, _ = library.nilmanifold()
        for p in (2, 3):
            complex_ = constant_complex(nil, p, 1)
            self.assertEqual([len(cohomology(complex_, n).factors) for n in range(4)],
                             [1, 2, 2, 1])

    def test_torus3_betti_numbers(self):
        torus3, _ = library.torus3()
        complex_ = constant_complex(torus3, 2, 1)
        self.assertEqual([len(cohomology(complex_, n).factors) for n in range(4)], [1, 3, 3, 1])

    def test_klein_bottle_torsion(self):
        """H^*(K; Z/4) = Z/4, Z/4 + Z/2, Z/2; with Z/3 the torsion disappears."""
        klein, _ = library.klein_bottle()
        complex_ = constant_complex(klein, 2, 2)
        self.assertEqual([cohomology(complex_, n).invariants for n in range(3)],
                         [(2,), (2, 1), (1,)])
        odd = constant_complex(klein, 3, 1)
        self.assertEqual([cohomology(odd, n).invariants for n in range(3)], [(1,), (1,), ()])

    def test_generators_project_to_unit_vectors(self):
        tower = AbelianTower(1, 2, 2)
        descriptor = FlatDescriptor.from_values(library.torus(), tower,
                                                {"a": 1, "b": 3, "c": 4})
        complex_ = twisted_complex(descriptor, r=2, s=2)
        h = cohomology(complex_, 1)
        for i, g in enumerate(h.generators):
            expected = tuple(int(i == j) for j in range(len(h.factors)))
            self.assertEqual(h.project(g), expected)
            image = complex_.differential(1).apply(g)
            self.assertEqual(image, {})

    def test_project_rejects_non_cocycle(self):
        complex_ = constant_complex(library.solid_triangle(), 2, 1)
        h = cohomology(complex_, 1)
        self.assertEqual(h.factors, ())
        with self.assertRaises(ChainMapError):
            h.project({0: 1})

    def test_non_complex_detected(self):
        """Coboundaries that do not compose to zero raise ChainMapError."""
        d0 = SparseMatrix(1, 1, {(0, 0): 1})
        d1 = SparseMatrix(1, 1, {(0, 0): 1})
        bogus = CochainComplex(2, 1, [1, 1, 1], [d0, d1])
        self.assertFalse(bogus.is_complex())
        with self.assertRaises(ChainMapError):
            cohomology(bogus, 1)


class TestLiftOracle(unittest.TestCase):
    """Direct elimination against the universal-coefficient route on random inputs."""

    def test_fifty_random_twisted_complexes(self):
        rng = random.Random(1234)
        bases = [library.torus(), library.klein_bottle()[0], library.wedge_of_circles(2),
                 library.cylinder()]
        for case in range(50):
            complex_ = bases[case % len(bases)]
            p = (2, 3)[case % 2]
            rank = 1 if p == 3 else rng.randint(1, 2)
            r = rng.randint(0, 2)
            s = rng.randint(1, 3)
            tower = AbelianTower(rank, p, 2)
            values = random_abelian_cocycle(complex_, rank, rng)
            descriptor = FlatDescriptor.from_values(complex_, tower, values)
            twisted = twisted_complex(descriptor, r=r, s=s)
            for n in range(complex_.dim + 1):
                with self.subTest(case=case, degree=n):
                    self.assertEqual(cohomology(twisted, n).invariants,
                                     cohomology_via_lift(twisted, n))

    def test_heisenberg_level_one(self):
        nil, elements = library.nilmanifold()
        descriptor = FlatDescriptor.from_values(nil, HeisenbergTower(2, 1), elements)
        twisted = twisted_complex(descriptor, r=1, s=2)
        for n in range(4):
            self.assertEqual(cohomology(twisted, n).invariants, cohomology_via_lift(twisted, n))


class TestInducedMaps(unittest.TestCase):
    """Functoriality of induced maps."""

    def setUp(self):
        tower = AbelianTower(1, 2, 3)
        self.descriptor = FlatDescriptor.from_values(library.circle(), tower, {"e": 1})
        self.levels = [twisted_complex(self.descriptor, r=r, s=3) for r in range(4)]

    def test_identity(self):
        complex_ = self.levels[1]
        identity = CochainMap(complex_, complex_, {
            n: SparseMatrix.identity(complex_.dimension(n), complex_.modulus) for n in range(2)})
        self.assertTrue(induced_map(identity, 1).is_identity())

    def test_composition(self):
        """H(g o f) = H(g) o H(f) for the tower maps 0 -> 1 -> 2."""
        f = cochain_inclusion(self.levels[0], self.levels[1])
        g = cochain_inclusion(self.levels[1], self.levels[2])
        for n in range(2):
            direct = induced_map(cochain_inclusion(self.levels[0], self.levels[2]), n)
            composed = induced_map(g, n).compose(induced_map(f, n))
            self.assertEqual(direct.matrix, composed.matrix)
            self.assertEqual(induced_map(g.compose(f), n).matrix, direct.matrix)

    def test_top_degree_multiplies_by_two(self):
        """On H^1 of the circle each level step is multiplication by the index 2."""
        f = cochain_inclusion(self.levels[1], self.levels[2])
        m = induced_map(f, 1)
        self.assertEqual(len(m.matrix), 1)
        self.assertEqual(valuation(m.matrix[0][0] % 8, 2, 3), 1)

    def test_bad_map_rejected(self):
        complex_ = self.levels[1]
        scaled = CochainMap(complex_, complex_, {
            0: SparseMatrix.identity(complex_.dimension(0), complex_.modulus),
            1: SparseMatrix.zero(complex_.dimension(1), complex_.dimension(1))})
        with self.assertRaises(ChainMapError) as ctx:
            induced_map(scaled, 1)
        self.assertEqual(ctx.exception.degree, 0)

    def test_map_that_is_not_a_homomorphism_rejected(self):
        """Cochains mod 2 copied into cochains mod 4 commute with d but are not well defined."""
        circle = library.circle()
        low, high = constant_complex(circle, 2, 1), constant_complex(circle, 2, 2)
        copied = CochainMap(low, high, {n: SparseMatrix.identity(1, 4) for n in range(2)})
        with self.assertRaises(ChainMapError) as ctx:
            induced_map(copied, 1)
        self.assertEqual(ctx.exception.degree, 1)
        doubled = CochainMap(low, high, {n: SparseMatrix(1, 1, {(0, 0): 2}, 4) for n in range(2)})
        self.assertEqual(induced_map(doubled, 1).matrix[0][0] % 4, 2)


class TestAbelianMaps(unittest.TestCase):
    """Kernels, isomorphisms and well-definedness between cyclic sums."""

    def test_multiplication_by_p(self):
        self.assertEqual(abelian.kernel_exponent([[2]], (2,), (2,), 2), 1)
        self.assertFalse(abelian.is_isomorphism([[2]], (2,), (2,), 2))
        self.assertTrue(abelian.is_isomorphism([[3]], (2,), (2,), 2))

    def test_swap_is_isomorphism(self):
        self.assertTrue(abelian.is_isomorphism([[0, 1], [1, 0]], (1, 2), (2, 1), 3))

    def test_well_defined(self):
        self.assertFalse(abelian.is_well_defined([[1]], (1,), (2,), 2))
        self.assertTrue(abelian.is_well_defined([[2]], (1,), (2,), 2))
        self.assertTrue(abelian.is_well_defined([[1]], (2,), (1,), 2))


if __name__ == "__main__":
    unittest.main(verbosity=2)
