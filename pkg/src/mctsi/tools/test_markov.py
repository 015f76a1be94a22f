"""
Unit tests for the Markov-property checks and the verification suites.
"""

import math
import unittest

import numpy as np

from ..config import MctsiConfig
from ..core.errors import SizeLimitError
from ..core.pmf import JointPmf
from ..core.tree import Tree, agglomerate
from ..info.shared_info import agglomerated_joint
from ..models import generators
from ..models.loader import load_target
from ..models.mct import joint_pmf
from . import SUITE_NAMES, get_suite
from .markov import (
    independent_sets,
    lemma1_identity_check,
    verify_edge_markov,
    verify_global_markov,
    verify_local_markov,
)

COUNTEREXAMPLE_CMI = 0.75 * (-(1 / 3) * math.log2(1 / 3) - (2 / 3) * math.log2(2 / 3)) - 0.5


def mix_with_uniform(p, weight):
    uniform = np.full(p.n_states, 1.0 / p.n_states)
    return JointPmf(p.variables, p.cards, (1 - weight) * p.probs + weight * uniform)


class TestEdgeMarkov(unittest.TestCase):
    """Per-edge checks."""

    def test_mct_joints_pass(self):
        rng = np.random.default_rng(21)
        for m in range(2, 8):
            model = generators.random_mct(m, rng)
            report = verify_edge_markov(model)
            self.assertTrue(report.passed, report.summary())
            self.assertLessEqual(report.worst_value, 1e-9)

    def test_binary_tree_passes_tight_tolerance(self):
        model = generators.example_binary_tree(3, (0.05, 0.1, 0.15, 0.2, 0.25, 0.3))
        self.assertTrue(verify_edge_markov(model, tol=1e-10).passed)

    def test_mixing_with_uniform_breaks_an_edge(self):
        model = generators.example_binary_tree(2, (0.1, 0.2))
        chain = generators.chain3()
        for base in (model, chain):
            perturbed = mix_with_uniform(joint_pmf(base), 0.2)
            report = verify_edge_markov(perturbed, base.tree, tol=1e-6)
            self.assertFalse(report.passed)
            self.assertGreater(report.violation_count, 0)

    def test_counterexample_fails_edge_check(self):
        pmf, tree = generators.local_not_global_pmf()
        report = verify_edge_markov(pmf, tree)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.worst_value, COUNTEREXAMPLE_CMI, places=9)


class TestLocalMarkov(unittest.TestCase):
    """Neighborhood checks."""

    def test_independent_sets(self):
        sets = list(independent_sets(Tree.path(4), 3))
        self.assertIn(frozenset({1, 3}), sets)
        self.assertIn(frozenset({1, 4}), sets)
        self.assertNotIn(frozenset({1, 2}), sets)
        self.assertEqual(sum(1 for s in sets if len(s) == 3), 0)

    def test_mct_joints_pass(self):
        rng = np.random.default_rng(22)
        for m in range(3, 8):
            self.assertTrue(verify_local_markov(generators.random_mct(m, rng)).passed)

    def test_counterexample_is_locally_markov(self):
        pmf, tree = generators.local_not_global_pmf()
        report = verify_local_markov(pmf, tree)
        self.assertTrue(report.passed, report.summary())
        self.assertGreater(report.tested, 5)

    def test_singletons_on_a_path(self):
        # middle vertex has no rest beyond its neighborhood
        report = verify_local_markov(generators.chain3(), set_cap=1)
        self.assertEqual(report.tested, 2)
        self.assertEqual(report.skipped, 1)
        self.assertTrue(report.passed)


class TestGlobalMarkov(unittest.TestCase):
    """Separated-triple scans."""

    def test_random_mcts_exhaustive(self):
        rng = np.random.default_rng(23)
        for m in (4, 5, 6, 7):
            model = generators.random_mct(m, rng)
            report = verify_global_markov(model)
            self.assertTrue(report.passed, report.summary())
            self.assertLessEqual(report.worst_value, 1e-9)

    def test_counts_on_path(self):
        # path 1-2-3: only S={2} separates, A={1}, B={3}
        report = verify_global_markov(generators.chain3())
        self.assertEqual(report.tested, 1)

    def test_counterexample_violation(self):
        pmf, tree = generators.local_not_global_pmf()
        report = verify_global_markov(pmf, tree)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.worst_value, COUNTEREXAMPLE_CMI, places=6)
        self.assertIn(((5,), (1, 2), (3,)), [(c.a, c.b, c.s) for c in report.violations]
                      + [(c.b, c.a, c.s) for c in report.violations])

    def test_sampled_mode(self):
        pmf, tree = generators.local_not_global_pmf()
        report = verify_global_markov(pmf, tree, mode="sampled", count=500, seed=3)
        self.assertEqual(report.tested, 500)
        self.assertFalse(report.passed)
        again = verify_global_markov(pmf, tree, mode="sampled", count=500, seed=3)
        self.assertEqual(report.worst, again.worst)

    def test_guard(self):
        model = generators.product_model(11)
        with self.assertRaises(SizeLimitError):
            verify_global_markov(model)

    def test_global_implies_edge(self):
        rng = np.random.default_rng(24)
        for _ in range(5):
            p = generators.random_pmf((2, 2, 2, 2), rng)
            tree = generators.random_tree(4, rng)
            if verify_global_markov(p, tree, tol=1e-9).passed:
                self.assertTrue(verify_edge_markov(p, tree, tol=1e-9).passed)
        model = generators.random_mct(5, rng)
        self.assertTrue(verify_global_markov(model).passed)
        self.assertTrue(verify_edge_markov(model).passed)


class TestLemma1(unittest.TestCase):
    """Branch information equals endpoint information."""

    def test_two_vertices(self):
        model = generators.random_mct(2, np.random.default_rng(1))
        report = lemma1_identity_check(model, tol=1e-12)
        self.assertTrue(report.passed)

    def test_binary_tree(self):
        model = generators.example_binary_tree(3, (0.1, 0.2, 0.3, 0.4, 0.15, 0.25))
        report = lemma1_identity_check(model, tol=1e-10)
        self.assertTrue(report.passed)
        self.assertEqual(report.tested, 6)

    def test_random_mcts(self):
        rng = np.random.default_rng(25)
        for m in range(3, 8):
            self.assertTrue(lemma1_identity_check(generators.random_mct(m, rng)).passed)


class TestAgglomeratedModels(unittest.TestCase):
    """Teaming connected atoms of an MCT gives an MCT on the quotient tree."""

    def test_quotient_joint_is_edge_markov(self):
        rng = np.random.default_rng(26)
        for _ in range(20):
            model = generators.random_mct(int(rng.integers(3, 7)), rng)
            k = int(rng.integers(2, model.m + 1))
            part = generators.random_connected_partition(model.tree, k, rng)
            quotient, _ = agglomerate(model.tree, part)
            teamed = agglomerated_joint(joint_pmf(model), part)
            self.assertTrue(verify_edge_markov(teamed, quotient).passed)


class TestSuites(unittest.TestCase):
    """Suite factory and wrappers."""

    def test_factory(self):
        for name in SUITE_NAMES:
            self.assertEqual(get_suite(name).name, name)
        with self.assertRaises(ValueError):
            get_suite("nothing")

    def test_all_suites_pass_on_an_mct(self):
        target = load_target("builtin:binary-tree:l=2,p=0.1/0.2")
        config = MctsiConfig()
        for name in SUITE_NAMES:
            result = get_suite(name).run(target, config)
            self.assertTrue(result.passed, result.summary)

    def test_counterexample_suites(self):
        target = load_target("builtin:local-not-global")
        config = MctsiConfig()
        self.assertTrue(get_suite("local").run(target, config).passed)
        self.assertFalse(get_suite("edge").run(target, config).passed)
        result = get_suite("global").run(target, config)
        self.assertFalse(result.passed)
        self.assertAlmostEqual(result.worst, COUNTEREXAMPLE_CMI, places=6)

    def test_loose_tolerance(self):
        target = load_target("builtin:local-not-global")
        self.assertTrue(get_suite("global").run(target, MctsiConfig(tol=0.2)).passed)
        self.assertFalse(get_suite("global").run(target, MctsiConfig(tol=1e-3)).passed)


if __name__ == "__main__":
    unittest.main()
