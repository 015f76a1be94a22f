"""
Unit tests for shared information, its companion measures and partition repair.
"""

import math
import unittest

import numpy as np

from ..core.errors import InvalidPartitionError, NoRepairNeeded, SizeLimitError
from ..core.partition import Partition, bell_number, enumerate_partitions
from ..core.pmf import JointPmf, SubsetEntropies, kl_divergence
from ..core.tree import Tree, branch_set, is_connected_set
from ..models import generators
from ..models.mct import joint_pmf
from .shared_info import (
    agglomerated_joint,
    atom_product,
    dual_total_correlation,
    dual_total_correlation_forms,
    edge_mutual_informations,
    partition_repair_step,
    partition_score,
    repair_partition,
    sandwich_check,
    si_brute_force,
    si_mct,
    step_one_identity,
    total_correlation,
    total_correlation_chain,
)


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def cut_partition(tree, edge):
    i, j = edge
    return Partition.of(branch_set(tree, i, j), branch_set(tree, j, i))


def identical_bits(m):
    """m copies of one fair bit."""
    probs = np.zeros(2 ** m)
    probs[0] = probs[-1] = 0.5
    return JointPmf(tuple(range(1, m + 1)), (2,) * m, probs)


def degrade(p, variable, channel):
    axis = p.axis_of(variable)
    tensor = np.moveaxis(np.tensordot(p.tensor, channel, axes=([axis], [0])), -1, axis)
    return JointPmf.from_tensor(p.variables, tensor)


class TestPartitionScore(unittest.TestCase):
    """I(pi) in both forms."""

    def setUp(self):
        self.rng = np.random.default_rng(31)

    def test_independent_variables_score_zero(self):
        p = JointPmf.uniform((1, 2, 3), (2, 3, 2))
        for part in enumerate_partitions(3):
            self.assertAlmostEqual(partition_score(p, part).score_bits, 0.0, places=12)

    def test_two_variables_give_mutual_information(self):
        p = generators.random_pmf((2, 3), self.rng)
        table = SubsetEntropies(p)
        score = partition_score(p, Partition.singletons(2))
        self.assertEqual(score.k, 2)
        self.assertAlmostEqual(score.score_bits, table.mi([1], [2]), places=12)

    def test_divergence_form_agrees(self):
        p = generators.random_pmf((2, 3, 2, 2), self.rng)
        for part in enumerate_partitions(4):
            entropy_form = partition_score(p, part).score_bits
            divergence_form = partition_score(p, part, form="divergence").score_bits
            self.assertAlmostEqual(entropy_form, divergence_form, places=10)
            # direct summation of D(P || prod P_pi_u)
            q = atom_product(p, part)
            support = p.probs > 0
            direct = float(np.sum(p.probs[support] * np.log2(p.probs[support] / q.probs[support])))
            self.assertAlmostEqual(entropy_form, direct / (part.k - 1), places=10)
            self.assertAlmostEqual(kl_divergence(p, q), direct, places=10)

    def test_single_atom_rejected(self):
        p = JointPmf.uniform((1, 2), (2, 2))
        with self.assertRaises(InvalidPartitionError):
            partition_score(p, Partition.of({1, 2}))


class TestBruteForce(unittest.TestCase):
    """Shared information by exhaustive search."""

    def setUp(self):
        self.rng = np.random.default_rng(32)

    def test_product_pmf(self):
        result = si_brute_force(JointPmf.uniform((1, 2, 3), (2, 2, 2)))
        self.assertAlmostEqual(result.value_bits, 0.0, places=12)
        self.assertEqual(result.argmin_partition, Partition.of({1, 2}, {3}))
        self.assertEqual(result.evaluated, bell_number(3) - 1)
        self.assertEqual(result.method, "brute")

    def test_three_variables_four_candidates(self):
        for _ in range(10):
            p = generators.random_pmf((2, 2, 3), self.rng)
            table = SubsetEntropies(p)
            candidates = [
                table.mi([1], [2, 3]),
                table.mi([2], [1, 3]),
                table.mi([3], [1, 2]),
                total_correlation(p) / 2,
            ]
            self.assertAlmostEqual(si_brute_force(p).value_bits, min(candidates), places=10)

    def test_identical_bits(self):
        p = identical_bits(4)
        self.assertAlmostEqual(si_brute_force(p).value_bits, 1.0, places=10)

    def test_guard(self):
        p = JointPmf.uniform(tuple(range(1, 6)), (2,) * 5)
        with self.assertRaises(SizeLimitError):
            si_brute_force(p, guard=4)

    def test_threads_do_not_change_the_answer(self):
        p = generators.random_pmf((2, 2, 2, 2, 2, 2, 2, 2), self.rng)
        sequential = si_brute_force(p)
        for threads in (2, 4):
            parallel = si_brute_force(p, threads=threads)
            self.assertEqual(parallel.value_bits, sequential.value_bits)
            self.assertEqual(parallel.argmin_partition, sequential.argmin_partition)
            self.assertEqual(parallel.evaluated, bell_number(8) - 1)

    def test_ties_go_to_the_first_partition_with_many_threads(self):
        p = JointPmf.uniform(tuple(range(1, 9)), (2,) * 8)
        result = si_brute_force(p, threads=3)
        self.assertEqual(result.argmin_partition, Partition.of(set(range(1, 8)), {8}))


class TestClosedForm(unittest.TestCase):
    """Minimum edge information on Markov chains on trees."""

    def setUp(self):
        self.rng = np.random.default_rng(33)

    def test_binary_tree_example(self):
        result = si_mct(generators.example_binary_tree(2, (0.1, 0.2)))
        self.assertAlmostEqual(result.value_bits, 0.2780719, places=7)
        self.assertAlmostEqual(result.value_bits, 1 - h2(0.2), places=12)
        self.assertEqual(result.argmin_edge, (1, 3))
        self.assertEqual(result.method, "exact")

    def test_binary_tree_closed_form(self):
        for l in (2, 3):
            for _ in range(20):
                p = self.rng.uniform(0.01, 0.49, size=2 ** l - 2)
                result = si_mct(generators.example_binary_tree(l, p))
                worst = int(np.argmax(p))
                self.assertAlmostEqual(result.value_bits, 1 - h2(p[worst]), places=10)
                self.assertEqual(result.argmin_edge, ((worst + 2) // 2, worst + 2))

    def test_edge_informations_match_dense_joint(self):
        model = generators.random_mct(6, self.rng)
        table = SubsetEntropies(joint_pmf(model))
        for (i, j), value in edge_mutual_informations(model).items():
            self.assertAlmostEqual(value, table.mi([i], [j]), places=10)

    def test_identity_kernels(self):
        model = generators.random_mct(4, self.rng, cards=(3,))
        kernels = {v: np.eye(3) for v in model.kernels}
        model = type(model)(tree=model.tree, root=model.root, cards=model.cards,
                            root_pmf=model.root_pmf, kernels=kernels)
        h_root = -float(np.sum(model.root_pmf * np.log2(model.root_pmf)))
        for value in edge_mutual_informations(model).values():
            self.assertAlmostEqual(value, h_root, places=10)

    def test_independent_edge(self):
        model = generators.product_model(4)
        for value in edge_mutual_informations(model).values():
            self.assertAlmostEqual(value, 0.0, places=12)
        self.assertEqual(si_mct(model).argmin_edge, (1, 2))

    def test_brute_force_matches_closed_form(self):
        for _ in range(200):
            model = generators.random_mct(int(self.rng.integers(3, 8)), self.rng)
            p = joint_pmf(model)
            brute, exact = si_brute_force(p), si_mct(model)
            self.assertAlmostEqual(brute.value_bits, exact.value_bits, delta=1e-9)
            cut = partition_score(p, cut_partition(model.tree, exact.argmin_edge)).score_bits
            self.assertAlmostEqual(partition_score(p, brute.argmin_partition).score_bits, cut, delta=1e-9)

    def test_markov_chains(self):
        for _ in range(50):
            model = generators.random_chain(int(self.rng.integers(3, 7)), self.rng)
            p = joint_pmf(model)
            table = SubsetEntropies(p)
            adjacent = min(table.mi([i], [i + 1]) for i in range(1, model.m))
            self.assertAlmostEqual(si_brute_force(p).value_bits, adjacent, delta=1e-9)

    def test_shared_information_below_every_edge(self):
        for _ in range(20):
            model = generators.random_mct(int(self.rng.integers(3, 7)), self.rng)
            si = si_brute_force(joint_pmf(model)).value_bits
            for value in edge_mutual_informations(model).values():
                self.assertLessEqual(si, value + 1e-9)


class TestCorrelationMeasures(unittest.TestCase):
    """Total and dual total correlation with the sandwich inequalities."""

    def setUp(self):
        self.rng = np.random.default_rng(34)

    def test_independent(self):
        p = JointPmf.uniform((1, 2, 3), (2, 2, 3))
        self.assertAlmostEqual(total_correlation(p), 0.0, places=12)
        self.assertAlmostEqual(dual_total_correlation(p), 0.0, places=12)
        report = sandwich_check(p)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.si, 0.0, places=12)

    def test_two_variables(self):
        p = generators.random_pmf((3, 2), self.rng)
        mi = SubsetEntropies(p).mi([1], [2])
        self.assertAlmostEqual(total_correlation(p), mi, places=12)
        self.assertAlmostEqual(dual_total_correlation(p), mi, places=12)

    def test_chain_rule_and_forms(self):
        p = generators.random_pmf((2, 3, 2, 2), self.rng)
        self.assertAlmostEqual(total_correlation(p), total_correlation_chain(p), places=10)
        self.assertAlmostEqual(
            total_correlation(p),
            (p.m - 1) * partition_score(p, Partition.singletons(p.m)).score_bits,
            places=10,
        )
        forms = dual_total_correlation_forms(p)
        self.assertAlmostEqual(forms["entropy"], forms["conditional"], places=10)
        self.assertAlmostEqual(forms["entropy"], forms["residual"], places=10)

    def test_identical_bits(self):
        p = identical_bits(4)
        report = sandwich_check(p)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.si, 1.0, places=10)
        self.assertAlmostEqual(report.total_correlation, 3.0, places=10)
        self.assertAlmostEqual(report.dual_total_correlation, 1.0, places=10)
        # C/(m-1) <= D is tight
        self.assertAlmostEqual(report.total_correlation / 3, report.dual_total_correlation, places=10)

    def test_random_pmfs_never_violate(self):
        for trial in range(500):
            m = 3 if trial % 2 else 4
            report = sandwich_check(generators.random_pmf((2,) * m, self.rng))
            self.assertTrue(report.passed, report.checks)


class TestRepair(unittest.TestCase):
    """Repair of partitions with disconnected atoms."""

    def setUp(self):
        self.rng = np.random.default_rng(35)

    def test_path_example(self):
        model = generators.chain3()
        p = joint_pmf(model)
        part = Partition.of({1, 3}, {2})
        step = partition_repair_step(p, part, model.tree)
        self.assertEqual(step.atom, frozenset({1}))
        self.assertEqual(step.pivot, 2)
        self.assertEqual(len(step.candidates), 2)
        self.assertIn(Partition.singletons(3), [c.partition for c in step.candidates])
        self.assertIn(Partition.of({1}, {2, 3}), [c.partition for c in step.candidates])
        self.assertLessEqual(step.after.score_bits, step.before.score_bits + 1e-10)

    def test_connected_input_is_left_alone(self):
        model = generators.chain3()
        p = joint_pmf(model)
        part = Partition.of({1, 2}, {3})
        with self.assertRaises(NoRepairNeeded):
            partition_repair_step(p, part, model.tree)
        result = repair_partition(p, part, model.tree)
        self.assertEqual(result.partition, part)
        self.assertEqual(result.steps, ())

    def test_random_partitions_of_random_mcts(self):
        for _ in range(40):
            model = generators.random_mct(int(self.rng.integers(4, 7)), self.rng)
            p = joint_pmf(model)
            partitions = list(enumerate_partitions(model.m))
            part = partitions[int(self.rng.integers(len(partitions)))]
            result = repair_partition(p, part, model.tree)
            for step in result.steps:
                self.assertLessEqual(step.after.score_bits, step.before.score_bits + 1e-10)
            self.assertTrue(all(is_connected_set(model.tree, atom) for atom in result.partition.atoms))
            self.assertLessEqual(result.score_bits, partition_score(p, part).score_bits + 1e-10)
            self.assertGreaterEqual(result.score_bits, si_mct(model).value_bits - 1e-9)

    def test_star_with_scattered_leaves(self):
        tree = Tree.star(5)
        model = generators.random_mct(5, self.rng, tree=tree)
        part = Partition.of({2, 3}, {1, 4}, {5})
        result = repair_partition(joint_pmf(model), part, tree)
        self.assertGreater(len(result.steps), 0)
        self.assertTrue(all(is_connected_set(tree, atom) for atom in result.partition.atoms))


class TestAgglomeration(unittest.TestCase):
    """Teamed variables of connected atoms."""

    def setUp(self):
        self.rng = np.random.default_rng(36)

    def test_teaming_never_lowers_shared_information(self):
        for _ in range(100):
            model = generators.random_mct(int(self.rng.integers(3, 7)), self.rng)
            p = joint_pmf(model)
            k = int(self.rng.integers(2, model.m + 1))
            part = generators.random_connected_partition(model.tree, k, self.rng)
            teamed = agglomerated_joint(p, part)
            self.assertEqual(teamed.m, part.k)
            self.assertGreaterEqual(si_brute_force(teamed).value_bits, si_brute_force(p).value_bits - 1e-10)

    def test_score_equals_mean_quotient_edge_information(self):
        for _ in range(30):
            model = generators.random_mct(int(self.rng.integers(3, 8)), self.rng)
            k = int(self.rng.integers(2, model.m + 1))
            part = generators.random_connected_partition(model.tree, k, self.rng)
            check = step_one_identity(joint_pmf(model), part, model.tree)
            self.assertLess(check.difference, 1e-9)


class TestDataProcessing(unittest.TestCase):
    def test_degrading_a_variable(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            m = int(rng.integers(2, 5))
            p = generators.random_pmf((2,) * m, rng)
            variable = int(rng.integers(1, m + 1))
            channel = generators.random_stochastic(2, 3, rng)
            degraded = degrade(p, variable, channel)
            self.assertLessEqual(si_brute_force(degraded).value_bits, si_brute_force(p).value_bits + 1e-9)


if __name__ == "__main__":
    unittest.main()
