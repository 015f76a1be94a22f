"""
Unit tests for set partitions and their enumeration.
"""

import unittest

from .errors import InvalidPartitionError, SizeLimitError
from .partition import Partition, bell_number, enumerate_partitions, restricted_growth_strings


class TestPartition(unittest.TestCase):
    """Canonical form and conversions."""

    def test_canonical_order(self):
        p = Partition.of({3}, {2, 4}, {1})
        self.assertEqual(p.atoms, (frozenset({1}), frozenset({2, 4}), frozenset({3})))
        self.assertEqual(p.k, 3)
        self.assertEqual(p.m, 4)
        self.assertEqual(str(p), "{1}{2,4}{3}")

    def test_rgs_round_trip(self):
        p = Partition.of({1, 3}, {2}, {4, 5})
        self.assertEqual(p.rgs(), (0, 1, 0, 2, 2))
        self.assertEqual(Partition.from_rgs(p.rgs()), p)

    def test_invalid_partitions(self):
        with self.assertRaises(InvalidPartitionError):
            Partition.of({1, 2}, {2, 3})
        with self.assertRaises(InvalidPartitionError):
            Partition.of({1}, {3})
        with self.assertRaises(InvalidPartitionError):
            Partition.from_rgs((0, 2))

    def test_replace(self):
        p = Partition.of({1, 3}, {2})
        self.assertEqual(p.replace([0], [{1}, {3}]), Partition.singletons(3))


class TestEnumeration(unittest.TestCase):
    """Restricted-growth-string enumeration."""

    def test_m3(self):
        parts = list(enumerate_partitions(3))
        self.assertEqual(len(parts), 4)
        self.assertEqual(
            {str(p) for p in parts},
            {"{1}{2}{3}", "{1,2}{3}", "{1,3}{2}", "{1}{2,3}"},
        )

    def test_m2_single_partition(self):
        self.assertEqual(list(enumerate_partitions(2)), [Partition.singletons(2)])

    def test_m4(self):
        self.assertEqual(len(list(enumerate_partitions(4))), 14)

    def test_counts_match_bell_numbers(self):
        for m in range(2, 9):
            parts = list(enumerate_partitions(m))
            self.assertEqual(len(parts), bell_number(m) - 1)
            self.assertEqual(len(set(parts)), len(parts))

    def test_min_atoms(self):
        self.assertEqual(len(list(enumerate_partitions(4, min_atoms=4))), 1)
        self.assertEqual(len(list(enumerate_partitions(4, min_atoms=3))), 7)

    def test_lexicographic_order(self):
        strings = list(restricted_growth_strings(4))
        self.assertEqual(strings, sorted(strings))
        self.assertEqual(len(strings), 15)

    def test_guard(self):
        with self.assertRaises(SizeLimitError):
            next(enumerate_partitions(13))
        self.assertEqual(sum(1 for _ in enumerate_partitions(6, guard=6)), bell_number(6) - 1)

    def test_guard_fires_on_call(self):
        with self.assertRaises(SizeLimitError):
            enumerate_partitions(13)
        with self.assertRaises(InvalidPartitionError):
            enumerate_partitions(3, min_atoms=4)

    def test_bad_min_atoms(self):
        with self.assertRaises(InvalidPartitionError):
            next(enumerate_partitions(3, min_atoms=1))

    def test_bell_numbers(self):
        self.assertEqual([bell_number(m) for m in range(8)], [1, 1, 2, 5, 15, 52, 203, 877])


if __name__ == "__main__":
    unittest.main()
