"""
Unit tests for tree topology queries.
"""

import itertools
import unittest

import numpy as np

from .errors import InvalidEdgeError, InvalidInputError, InvalidPartitionError, InvalidTreeError
from .partition import Partition
from .tree import (
    Tree,
    agglomerate,
    branch_set,
    is_connected_set,
    maximally_connected_components,
    neighborhood,
    separates,
)


def random_tree(m, rng):
    """Random recursive tree: vertex v attaches to a uniform earlier vertex."""
    return Tree(m, tuple((int(rng.integers(1, v)), v) for v in range(2, m + 1)))


def dfs_component(tree, start, removed_edge=None, removed_vertices=()):
    """Plain DFS oracle independent of networkx."""
    adjacency = {v: set() for v in range(1, tree.m + 1)}
    for i, j in tree.edges:
        if removed_edge in ((i, j), (j, i)):
            continue
        adjacency[i].add(j)
        adjacency[j].add(i)
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in adjacency[v]:
            if w not in seen and w not in removed_vertices:
                seen.add(w)
                stack.append(w)
    return seen


class TestTree(unittest.TestCase):
    """Tree validation."""

    def test_single_vertex(self):
        t = Tree(1, ())
        self.assertEqual(t.vertices, frozenset({1}))

    def test_edges_are_canonical(self):
        t = Tree(3, ((2, 1), (3, 2)))
        self.assertEqual(t.edges, ((1, 2), (2, 3)))
        self.assertEqual(t, Tree.path(3))

    def test_cycle_is_not_a_tree(self):
        with self.assertRaises(InvalidTreeError) as ctx:
            Tree(4, ((1, 2), (2, 3), (3, 1)))
        self.assertIn("not a tree", str(ctx.exception))

    def test_rejects_self_loop_and_duplicates(self):
        with self.assertRaises(InvalidTreeError):
            Tree(2, ((1, 1),))
        with self.assertRaises(InvalidTreeError):
            Tree(3, ((1, 2), (2, 1)))

    def test_rejects_out_of_range(self):
        with self.assertRaises(InvalidTreeError):
            Tree(2, ((1, 3),))

    def test_bfs_order_and_parents(self):
        t = Tree(5, ((1, 2), (1, 3), (2, 4), (2, 5)))
        self.assertEqual(t.bfs_order(1), [1, 2, 3, 4, 5])
        self.assertEqual(t.parents(1), {2: 1, 3: 1, 4: 2, 5: 2})
        self.assertEqual(t.parents(4)[1], 2)


class TestBranchSet(unittest.TestCase):
    """B(i <- j)."""

    def test_path_examples(self):
        t = Tree.path(3)
        self.assertEqual(branch_set(t, 1, 2), {1})
        self.assertEqual(branch_set(t, 2, 3), {1, 2})

    def test_non_edge(self):
        with self.assertRaises(InvalidEdgeError):
            branch_set(Tree.path(3), 1, 3)

    def test_branches_split_vertices(self):
        rng = np.random.default_rng(8)
        t = random_tree(8, rng)
        for i, j in t.edges:
            left, right = branch_set(t, i, j), branch_set(t, j, i)
            self.assertEqual(left | right, t.vertices)
            self.assertFalse(left & right)
            self.assertIn(i, left)
            self.assertNotIn(j, left)
            self.assertEqual(left, dfs_component(t, i, removed_edge=(i, j)))


class TestNeighborhood(unittest.TestCase):
    """N(S)."""

    def test_star_center(self):
        self.assertEqual(neighborhood(Tree.star(5), {1}), {2, 3, 4, 5})

    def test_path_leaf(self):
        self.assertEqual(neighborhood(Tree.path(4), {4}), {3})

    def test_union_oracle(self):
        rng = np.random.default_rng(9)
        t = random_tree(9, rng)
        s = {1, 5, 7}
        expected = set()
        for v in s:
            expected |= {w for e in t.edges for w in e if v in e and w != v}
        self.assertEqual(neighborhood(t, s), expected - s)

    def test_empty_set(self):
        with self.assertRaises(InvalidInputError):
            neighborhood(Tree.path(3), set())


class TestSeparation(unittest.TestCase):
    """Vertex separation."""

    def test_path_examples(self):
        self.assertTrue(separates(Tree.path(3), {1}, {3}, {2}))
        self.assertTrue(separates(Tree.path(4), {1}, {4}, {3}))
        self.assertFalse(separates(Tree.path(4), {1}, {3}, {4}))
        with self.assertRaises(InvalidInputError):
            separates(Tree.path(4), {1}, {4}, set())

    def test_overlap_rejected(self):
        with self.assertRaises(InvalidInputError):
            separates(Tree.path(4), {1, 2}, {2}, {3})

    def test_matches_path_oracle_and_symmetry(self):
        rng = np.random.default_rng(10)
        for _ in range(5):
            t = random_tree(7, rng)
            for a, b, s in itertools.permutations(range(1, 8), 3):
                expected = b not in dfs_component(t, a, removed_vertices={s})
                self.assertEqual(separates(t, {a}, {b}, {s}), expected)
                self.assertEqual(separates(t, {b}, {a}, {s}), expected)

    def test_enlarging_separator_preserves(self):
        t = Tree.path(5)
        self.assertTrue(separates(t, {1}, {5}, {3}))
        self.assertTrue(separates(t, {1}, {5}, {2, 3}))


class TestComponents(unittest.TestCase):
    """Maximally connected components."""

    def test_connected_set(self):
        self.assertEqual(maximally_connected_components(Tree.path(4), {2, 3}), [frozenset({2, 3})])

    def test_star_leaves(self):
        self.assertEqual(maximally_connected_components(Tree.star(4), {3, 2}), [frozenset({2}), frozenset({3})])

    def test_union_find_oracle(self):
        rng = np.random.default_rng(12)
        t = random_tree(10, rng)
        s = {1, 2, 4, 6, 8, 9}
        parent = {v: v for v in s}

        def find(v):
            while parent[v] != v:
                v = parent[v]
            return v

        for i, j in t.edges:
            if i in s and j in s:
                parent[find(i)] = find(j)
        groups = {}
        for v in s:
            groups.setdefault(find(v), set()).add(v)
        expected = sorted((frozenset(g) for g in groups.values()), key=min)
        self.assertEqual(maximally_connected_components(t, s), expected)
        self.assertEqual(is_connected_set(t, s), len(expected) == 1)


class TestAgglomerate(unittest.TestCase):
    """Quotient trees of connected partitions."""

    def test_path_quotient(self):
        quotient, witness = agglomerate(Tree.path(4), Partition.of({1, 2}, {3}, {4}))
        self.assertEqual(quotient, Tree.path(3))
        self.assertEqual(witness, {(1, 2): (2, 3), (2, 3): (3, 4)})

    def test_singletons_copy_tree(self):
        t = Tree(5, ((1, 2), (1, 3), (3, 4), (3, 5)))
        quotient, _ = agglomerate(t, Partition.singletons(5))
        self.assertEqual(quotient, t)

    def test_disconnected_atom(self):
        with self.assertRaises(InvalidPartitionError):
            agglomerate(Tree.path(3), Partition.of({1, 3}, {2}))

    def test_random_connected_partitions(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            t = random_tree(8, rng)
            cut = rng.choice(len(t.edges), size=3, replace=False)
            kept = [e for index, e in enumerate(t.edges) if index not in cut]
            atoms, seen = [], set()
            for v in range(1, 9):
                if v not in seen:
                    component = _reach(v, kept)
                    atoms.append(component)
                    seen |= component
            quotient, witness = agglomerate(t, Partition.of(*atoms))
            self.assertEqual(quotient.m, 4)
            self.assertEqual(len(quotient.edges), 3)
            self.assertEqual(len(witness), 3)


def _reach(start, edges):
    adjacency = {}
    for i, j in edges:
        adjacency.setdefault(i, set()).add(j)
        adjacency.setdefault(j, set()).add(i)
    seen, stack = {start}, [start]
    while stack:
        for w in adjacency.get(stack.pop(), ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


if __name__ == "__main__":
    unittest.main()
