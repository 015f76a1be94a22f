"""
Set partitions of the vertex set {1..m}.

Partitions are kept in canonical form (atoms ordered by smallest member), which
coincides with the block numbering of the partition's restricted growth string.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Tuple

from .errors import InvalidPartitionError, SizeLimitError

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_GUARD = 12


@dataclass(frozen=True)
class Partition:
    """A k-partition of {1..m} into disjoint nonempty atoms."""
    atoms: Tuple[frozenset, ...]

    def __post_init__(self):
        atoms = [frozenset(int(v) for v in atom) for atom in self.atoms]
        if not atoms:
            raise InvalidPartitionError("Partition needs at least one atom")
        if any(not atom for atom in atoms):
            raise InvalidPartitionError("Partition atoms must be nonempty")
        members = sorted(v for atom in atoms for v in atom)
        if members != list(range(1, len(members) + 1)):
            raise InvalidPartitionError(
                f"Atoms must be disjoint and cover 1..m, got {[sorted(a) for a in atoms]}"
            )
        object.__setattr__(self, "atoms", tuple(sorted(atoms, key=min)))

    @property
    def k(self) -> int:
        return len(self.atoms)

    @property
    def m(self) -> int:
        return sum(len(atom) for atom in self.atoms)

    def atom_of(self, vertex: int) -> int:
        """0-based index of the atom containing ``vertex``."""
        for index, atom in enumerate(self.atoms):
            if vertex in atom:
                return index
        raise InvalidPartitionError(f"Vertex {vertex} not covered by partition")

    def rgs(self) -> Tuple[int, ...]:
        """Restricted growth string: entry v-1 is the block index of vertex v."""
        return tuple(self.atom_of(v) for v in range(1, self.m + 1))

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        blocks: List[List[int]] = []
        for vertex, block in enumerate(rgs, start=1):
            if block > len(blocks):
                raise InvalidPartitionError(f"{tuple(rgs)} is not a restricted growth string")
            if block == len(blocks):
                blocks.append([])
            blocks[block].append(vertex)
        return cls(tuple(frozenset(b) for b in blocks))

    @classmethod
    def of(cls, *atoms: Iterable[int]) -> "Partition":
        return cls(tuple(frozenset(a) for a in atoms))

    @classmethod
    def singletons(cls, m: int) -> "Partition":
        return cls(tuple(frozenset((v,)) for v in range(1, m + 1)))

    def replace(self, remove: Sequence[int], add: Sequence[Iterable[int]]) -> "Partition":
        """New partition with atoms at positions ``remove`` swapped for ``add``."""
        kept = [atom for index, atom in enumerate(self.atoms) if index not in set(remove)]
        return Partition(tuple(kept) + tuple(frozenset(a) for a in add))

    def __str__(self):
        return "".join("{" + ",".join(str(v) for v in sorted(atom)) + "}" for atom in self.atoms)


def restricted_growth_strings(m: int) -> Iterator[Tuple[int, ...]]:
    """All restricted growth strings of length m, in lexicographic order."""
    if m < 1:
        return
    a = [0] * m
    b = [1] * m  # b[i] = 1 + max(a[:i])
    while True:
        yield tuple(a)
        i = m - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, m):
            a[j] = 0
            b[j] = max(b[i], a[i] + 1)


def enumerate_partitions(m: int, min_atoms: int = 2,
                         guard: int = DEFAULT_ENUMERATION_GUARD) -> Iterator[Partition]:
    """Every partition of {1..m} with at least ``min_atoms`` atoms, in RGS order."""
    if m > guard:
        raise SizeLimitError(f"Enumerating partitions of {m} vertices exceeds the guard of {guard}")
    if not 2 <= min_atoms <= m:
        raise InvalidPartitionError(f"Need 2 <= min_atoms <= m, got min_atoms={min_atoms}, m={m}")
    return (Partition.from_rgs(rgs) for rgs in restricted_growth_strings(m) if max(rgs) + 1 >= min_atoms)


def bell_number(m: int) -> int:
    """Number of partitions of an m-set, from the Bell triangle."""
    if m < 0:
        raise ValueError("Bell numbers are defined for m >= 0")
    row = [1]
    for _ in range(m):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]
