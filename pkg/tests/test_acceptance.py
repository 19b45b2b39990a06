#!/usr/bin/env python3
"""
End-to-end runs of the bundled example configs.
"""

import os
import sys
import unittest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from completedcoh.cli_runner import list_builtin_examples, resolve_config, run


def degrees_of(report):
    """{degree: (free rank, torsion, confidence)} from the completed check."""
    data = report.check("completed").data["report"]
    return {entry["degree"]: (entry["reconstruction"]["free_rank"],
                              tuple(entry["reconstruction"]["torsion"]),
                              entry["confidence"])
            for entry in data["degrees"]}


class TestCircle(unittest.TestCase):
    """circle: H^0 = Z_p and H^1 = 0, with the index-2 transfer in the top degree."""

    @classmethod
    def setUpClass(cls):
        cls.report = run(resolve_config("circle"), jobs=1)

    def test_all_checks_pass(self):
        self.assertEqual([c.name for c in self.report.failed], [])

    def test_reconstruction(self):
        self.assertEqual(degrees_of(self.report), {0: (1, (), "certified"),
                                                   1: (0, (), "certified")})

    def test_top_degree_lookahead_grows_with_precision(self):
        data = self.report.check("colimit").data["degrees"][1]["colimits"]
        lookaheads = [per_s[0]["stabilization"]["lookahead"] for per_s in data]
        self.assertEqual(lookaheads, [1, 2, 3])

    def test_transfer_entries(self):
        entries = self.report.check("transfer").data["entries"]
        self.assertEqual(len(entries), 5)
        self.assertTrue(all(e["valuation"] == e["expected"] == 1 for e in entries))


class TestTorusDefect(unittest.TestCase):
    """torus_defect1: a rank-one tower leaves Z_p in degree 1."""

    @classmethod
    def setUpClass(cls):
        cls.report = run(resolve_config("torus_defect1"), jobs=1)

    def test_passes(self):
        self.assertTrue(self.report.passed)

    def test_values(self):
        found = degrees_of(self.report)
        self.assertEqual(found[0][:2], (1, ()))
        self.assertEqual(found[1][:2], (1, ()))
        self.assertEqual(found[2][:2], (0, ()))
        defect = self.report.check("defect").data
        self.assertEqual((defect["defect"], defect["algebraic"]), (1, 1))


class TestCylinderBoundary(unittest.TestCase):
    """cylinder_boundary: exact long sequence of the pair at every level."""

    @classmethod
    def setUpClass(cls):
        cls.report = run(resolve_config("cylinder_boundary"), jobs=1)

    def test_passes(self):
        self.assertTrue(self.report.passed)

    def test_les_is_exact(self):
        data = self.report.check("les").data
        self.assertTrue(data["exact"])
        self.assertEqual(data["alternating_sums"], [0] * 5)

    def test_relative_values(self):
        found = degrees_of(self.report)
        self.assertEqual({n: v[:2] for n, v in found.items()},
                         {0: (0, ()), 1: (1, ()), 2: (0, ())})


class TestSmallExamples(unittest.TestCase):
    """excise_demo and cech_demo."""

    def test_excise_demo(self):
        report = run(resolve_config("excise_demo"), jobs=1)
        self.assertTrue(report.passed)
        self.assertEqual(report.check("excise").data["indices"], [1, 2, 4])

    def test_cech_demo(self):
        report = run(resolve_config("cech_demo"), jobs=1)
        self.assertTrue(report.passed)
        data = report.check("cech").data
        self.assertTrue(data["absolute"]["agree"])
        self.assertTrue(data["relative"]["agree"])


class TestTorusFull(unittest.TestCase):
    """torus_full: only degree 0 survives, and the top-degree maps are multiplication by 4."""

    @classmethod
    def setUpClass(cls):
        cls.report = run(resolve_config("torus_full"), jobs=2)

    def test_passes(self):
        self.assertTrue(self.report.passed)

    def test_values(self):
        self.assertEqual({n: v[:2] for n, v in degrees_of(self.report).items()},
                         {0: (1, ()), 1: (0, ()), 2: (0, ())})
        self.assertEqual(self.report.check("defect").data["defect"], 0)

    def test_transfer_entries(self):
        entries = self.report.check("transfer").data["entries"]
        self.assertEqual(len(entries), 4)
        for entry in entries:
            self.assertEqual((entry["index"], entry["valuation"], entry["expected"]), (4, 2, 2))


class TestHeisenberg(unittest.TestCase):
    """heisenberg: Z_p in degree 0, equal to the torus below the center."""

    @classmethod
    def setUpClass(cls):
        cls.report = run(resolve_config("heisenberg"), jobs=2)

    def test_passes(self):
        self.assertTrue(self.report.passed)

    def test_collapse(self):
        self.assertTrue(self.report.check("nilpotent_collapse").data["equal"])
        self.assertEqual(degrees_of(self.report)[0][:2], (1, ()))

    def test_transfer_entries(self):
        entries = self.report.check("transfer").data["entries"]
        self.assertEqual([(e["index"], e["valuation"], e["expected"]) for e in entries],
                         [(8, 1, 1), (8, 1, 1)])


class TestDeterminism(unittest.TestCase):
    """The report hash does not depend on the number of workers."""

    def test_every_builtin(self):
        for name, _ in list_builtin_examples():
            config = resolve_config(name)
            with self.subTest(name=name):
                self.assertEqual(run(config, jobs=1).digest, run(config, jobs=3).digest)


if __name__ == "__main__":
    unittest.main(verbosity=2)
