#!/usr/bin/env python3
"""
Tests for towers of finite p-groups, subtowers and quotients.
"""

import os
import pickle
import sys
import unittest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from completedcoh.errors import NonNormalSubgroupError, TowerError
from completedcoh.group_towers import (AbelianTower, CustomTower, HeisenbergTower, SubTower,
                                       SubgroupTower, center_subtower, closure_of,
                                       make_abelian_tower, make_custom_tower,
                                       make_heisenberg_tower, quotient_tower,
                                       tower_from_subtower, validate_tower)


def cyclic_tables(p, depth):
    """Cayley and projection tables of Z/p^r for r = 1..depth."""
    tables = []
    projections = []
    for r in range(1, depth + 1):
        q = p ** r
        tables.append([[(a + b) % q for b in range(q)] for a in range(q)])
        projections.append([a % p ** (r - 1) for a in range(q)])
    return tables, projections


class TestAbelianTower(unittest.TestCase):
    """(Z/p^r)^N with reduction maps."""

    def setUp(self):
        """Set up (Z/2^r)^2 up to level 3."""
        self.tower = AbelianTower(2, 2, 3)

    def test_orders(self):
        self.assertEqual([self.tower.order(r) for r in range(4)], [1, 4, 16, 64])

    def test_validates(self):
        self.assertTrue(validate_tower(self.tower))

    def test_element_images(self):
        """An element reduces compatibly at every level."""
        g = self.tower.element((3, 5))
        self.assertEqual(g.at(0), (0, 0))
        self.assertEqual(g.at(2), (3, 1))
        self.assertEqual(g.at(3), (3, 5))

    def test_projection_is_homomorphism(self):
        group = self.tower.level(3)
        a = group.index_of((3, 5))
        b = group.index_of((7, 1))
        lower = self.tower.level(2)
        self.assertEqual(self.tower.project(3, group.mul(a, b)),
                         lower.mul(self.tower.project(3, a), self.tower.project(3, b)))

    def test_translations_are_inverse(self):
        """Left translation by g then by g^-1 is the identity permutation."""
        group = self.tower.level(2)
        g = group.index_of((1, 3))
        forward = group.left_translation(g)
        back = group.left_translation(group.inv(g))
        self.assertEqual([back[forward[x]] for x in range(group.order)],
                         list(range(group.order)))

    def test_wrong_rank(self):
        with self.assertRaises(TowerError):
            self.tower.element((1, 2, 3))

    def test_non_prime(self):
        with self.assertRaises(TowerError):
            AbelianTower(1, 4, 2)

    def test_level_out_of_range(self):
        with self.assertRaises(TowerError):
            self.tower.level(4)

    def test_pickle_drops_caches(self):
        """Towers travel to worker processes without their locks."""
        self.tower.level(2).row(1)
        copy = pickle.loads(pickle.dumps(self.tower))
        self.assertEqual(copy.order(2), 16)
        self.assertEqual(copy.level(2).mul(1, 2), self.tower.level(2).mul(1, 2))


class TestHeisenbergTower(unittest.TestCase):
    """Unipotent 3x3 matrices over Z/p^r."""

    def setUp(self):
        self.tower = HeisenbergTower(2, 2)

    def test_orders_and_validation(self):
        self.assertEqual(self.tower.order(2), 64)
        self.assertTrue(validate_tower(self.tower))

    def test_non_abelian(self):
        group = self.tower.level(1)
        self.assertFalse(group.is_abelian())
        x = group.index_of((1, 0, 0))
        y = group.index_of((0, 1, 0))
        self.assertEqual(group.element(group.mul(x, y)), (1, 1, 1))
        self.assertEqual(group.element(group.mul(y, x)), (1, 1, 0))

    def test_center_is_normal(self):
        center = self.tower.center()
        self.assertTrue(center.is_normal())
        self.assertEqual(center.index(2), 16)

    def test_non_normal_subgroup_witness(self):
        """The subgroup generated by (1, 0, 0) is not normal; the witness conjugates out."""
        sub = closure_of(self.tower, [self.tower.element((1, 0, 0))])
        self.assertFalse(sub.is_normal())
        with self.assertRaises(NonNormalSubgroupError) as ctx:
            quotient_tower(self.tower, sub)
        self.assertEqual(ctx.exception.level, 1)
        self.assertIsNotNone(ctx.exception.witness)

    def test_quotient_by_center_is_abelian(self):
        quotient = quotient_tower(self.tower, self.tower.center())
        self.assertEqual(quotient.order(2), 16)
        self.assertTrue(quotient.level(2).is_abelian())
        self.assertTrue(validate_tower(quotient))
        image = quotient.element((1, 1, 3))
        self.assertEqual(image.at(2), (1, 1, 0))

    def test_generators_close_to_every_level(self):
        """(1, 0, 0) and (0, 1, 0) generate L_r; the commutator supplies the center."""
        sub = closure_of(self.tower, [self.tower.element((1, 0, 0)),
                                      self.tower.element((0, 1, 0))])
        for r in (1, 2):
            self.assertEqual(len(sub.subgroups[r]), self.tower.order(r))

    def test_quotient_by_center_matches_abelian_rank_two(self):
        """At level 1 the quotient by the center is (Z/2)^2."""
        quotient = quotient_tower(self.tower, self.tower.center())
        group = quotient.level(1)
        plain = AbelianTower(2, 2, 1).level(1)
        self.assertEqual(group.order, plain.order)
        self.assertTrue(group.is_abelian())
        self.assertTrue(all(group.mul(x, x) == group.identity for x in range(group.order)))


class TestFactories(unittest.TestCase):
    """make_abelian_tower, make_heisenberg_tower and center_subtower."""

    def test_abelian_orders(self):
        tower = make_abelian_tower(1, 2, 3)
        self.assertEqual([tower.order(r) for r in range(4)], [1, 2, 4, 8])
        self.assertEqual(make_abelian_tower(2, 3, 2).order(2), 81)

    def test_rank_zero_is_trivial(self):
        tower = make_abelian_tower(0, 5, 3)
        self.assertEqual([tower.order(r) for r in range(4)], [1, 1, 1, 1])
        self.assertTrue(validate_tower(tower))

    def test_heisenberg_mod_three_has_exponent_three(self):
        tower = make_heisenberg_tower(3, 1)
        group = tower.level(1)
        self.assertEqual(group.order, 27)
        for x in range(group.order):
            self.assertEqual(group.mul(group.mul(x, x), x), group.identity)

    def test_heisenberg_projection_reduces_entries(self):
        tower = make_heisenberg_tower(2, 2)
        group = tower.level(2)
        x = group.index_of((3, 2, 1))
        self.assertEqual(tower.level(1).element(tower.project(2, x)), (1, 0, 1))

    def test_center_subtower(self):
        tower = make_heisenberg_tower(2, 2)
        center = center_subtower(tower)
        self.assertEqual([len(h) for h in center.subgroups], [1, 2, 4])
        with self.assertRaises(TowerError):
            center_subtower(make_abelian_tower(1, 2, 2))


class TestCustomTower(unittest.TestCase):
    """Towers given by Cayley tables."""

    def test_cyclic_tables_validate(self):
        tables, projections = cyclic_tables(3, 2)
        tower = make_custom_tower(3, tables, projections)
        self.assertEqual(tower.order(2), 9)
        self.assertEqual(tower.element((1, 4)).at(2), (4,))

    def test_incompatible_element(self):
        tables, projections = cyclic_tables(2, 2)
        tower = CustomTower(2, tables, projections)
        with self.assertRaises(TowerError):
            tower.element((1, 2))

    def test_non_associative_table(self):
        table = [[0, 1, 2], [1, 0, 2], [2, 2, 0]]
        with self.assertRaises(TowerError):
            CustomTower(3, [table], [[0, 0, 0]])

    def test_order_not_power_of_p(self):
        tables, projections = cyclic_tables(2, 1)
        tower = CustomTower(3, tables, projections)
        with self.assertRaises(TowerError):
            validate_tower(tower)

    def test_projection_not_homomorphism(self):
        tables, _ = cyclic_tables(2, 2)
        with self.assertRaises(TowerError):
            make_custom_tower(2, tables, [[0, 0], [0, 0, 1, 1]])


class TestSubtowers(unittest.TestCase):
    """Closures, indices and subgroup towers."""

    def setUp(self):
        self.tower = AbelianTower(2, 2, 2)

    def test_closure_of_axis(self):
        sub = closure_of(self.tower, [self.tower.element((1, 0))])
        self.assertEqual([sub.index(r) for r in range(3)], [1, 2, 4])
        self.assertFalse(sub.is_full())

    def test_closure_of_generators_is_full(self):
        sub = closure_of(self.tower, [self.tower.element((1, 0)), self.tower.element((1, 1))])
        self.assertTrue(sub.is_full())

    def test_subgroup_tower(self):
        sub = closure_of(self.tower, [self.tower.element((0, 2))])
        small = tower_from_subtower(sub)
        self.assertIsInstance(small, SubgroupTower)
        self.assertEqual([small.order(r) for r in range(3)], [1, 1, 2])
        self.assertTrue(validate_tower(small))
        with self.assertRaises(TowerError):
            small.element((1, 0))

    def test_subtower_contains(self):
        sub = SubTower(self.tower, tuple(frozenset(range(self.tower.order(r)))
                                         for r in range(3)))
        self.assertTrue(sub.is_full())
        self.assertTrue(sub.contains(2, 5))

    def test_closure_is_idempotent(self):
        for values in ([(0, 2)], [(1, 0)], [(1, 2), (2, 1)]):
            sub = closure_of(self.tower, [self.tower.element(v) for v in values])
            top = self.tower.level(2)
            again = closure_of(self.tower, [self.tower.element_from_top(top.element(x))
                                            for x in sorted(sub.subgroups[2])])
            with self.subTest(values=values):
                self.assertEqual(again.subgroups, sub.subgroups)


if __name__ == "__main__":
    unittest.main(verbosity=2)
