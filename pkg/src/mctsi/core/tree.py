"""
Tree topology queries: branch sets, neighborhoods, separation, connected
components and agglomeration of a partition into a quotient tree.
Vertices are the integers 1..m.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Tuple

import networkx as nx

from .errors import InvalidEdgeError, InvalidInputError, InvalidPartitionError, InvalidTreeError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
VertexSet = FrozenSet[int]


def as_edge(i: int, j: int) -> Edge:
    """Canonical (smaller, larger) form of an undirected edge."""
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class Tree:
    """Undirected tree on vertices 1..m."""
    m: int
    edges: Tuple[Edge, ...]
    graph: nx.Graph = field(init=False, repr=False)

    def __post_init__(self):
        m = int(self.m)
        if m < 1:
            raise InvalidTreeError(f"Tree needs at least one vertex, got m={m}")
        edges = []
        for raw in self.edges:
            i, j = (int(v) for v in raw)
            if i == j:
                raise InvalidTreeError(f"not a tree: self-loop at vertex {i}")
            if not (1 <= i <= m and 1 <= j <= m):
                raise InvalidTreeError(f"Edge ({i},{j}) has a vertex outside 1..{m}")
            edges.append(as_edge(i, j))
        if len(set(edges)) != len(edges):
            raise InvalidTreeError("not a tree: duplicate edges")
        if len(edges) != m - 1:
            raise InvalidTreeError(f"not a tree: {len(edges)} edges for {m} vertices (need {m - 1})")
        graph = nx.Graph()
        graph.add_nodes_from(range(1, m + 1))
        graph.add_edges_from(edges)
        if not nx.is_connected(graph):
            raise InvalidTreeError("not a tree: graph is disconnected (edges contain a cycle)")
        nx.freeze(graph)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        object.__setattr__(self, "graph", graph)

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return False
        return self.m == other.m and self.edges == other.edges

    def __hash__(self):
        return hash((self.m, self.edges))

    @property
    def vertices(self) -> VertexSet:
        return frozenset(range(1, self.m + 1))

    def has_edge(self, i: int, j: int) -> bool:
        return self.graph.has_edge(i, j)

    def neighbors(self, i: int) -> VertexSet:
        return frozenset(self.graph.neighbors(i))

    def parents(self, root: int) -> Dict[int, int]:
        """Parent of every non-root vertex when the tree is oriented away from ``root``."""
        return dict(nx.bfs_predecessors(self.graph, root))

    def bfs_order(self, root: int) -> List[int]:
        """Vertices in breadth-first order from ``root``, children visited in increasing id."""
        order = [root]
        for _, child in nx.bfs_edges(self.graph, root, sort_neighbors=sorted):
            order.append(child)
        return order

    @classmethod
    def path(cls, m: int) -> "Tree":
        return cls(m, tuple((i, i + 1) for i in range(1, m)))

    @classmethod
    def star(cls, m: int) -> "Tree":
        return cls(m, tuple((1, i) for i in range(2, m + 1)))


def as_vertex_set(t: Tree, members: Iterable[int]) -> VertexSet:
    s = frozenset(int(v) for v in members)
    bad = [v for v in s if not 1 <= v <= t.m]
    if bad:
        raise InvalidInputError(f"Vertices {sorted(bad)} outside 1..{t.m}")
    return s


def branch_set(t: Tree, i: int, j: int) -> VertexSet:
    """B(i <- j): the side of edge (i, j) that contains i."""
    if not t.has_edge(i, j):
        raise InvalidEdgeError(f"({i},{j}) is not an edge of the tree")
    cut = nx.restricted_view(t.graph, [], [(i, j)])
    return frozenset(nx.node_connected_component(cut, i))


def neighborhood(t: Tree, s: Iterable[int]) -> VertexSet:
    """N(S): vertices adjacent to some member of S, excluding S itself."""
    s = as_vertex_set(t, s)
    if not s:
        raise InvalidInputError("Neighborhood of the empty set is undefined")
    adjacent = set()
    for v in s:
        adjacent.update(t.graph.neighbors(v))
    return frozenset(adjacent - s)


def separates(t: Tree, a: Iterable[int], b: Iterable[int], s: Iterable[int]) -> bool:
    """True iff every path between A and B passes through S."""
    a, b, s = as_vertex_set(t, a), as_vertex_set(t, b), as_vertex_set(t, s)
    if not a or not b or not s:
        raise InvalidInputError("Separation needs nonempty A, B and S")
    if a & b or a & s or b & s:
        raise InvalidInputError("Separation needs pairwise disjoint A, B and S")
    rest = nx.restricted_view(t.graph, s, [])
    for component in nx.connected_components(rest):
        if component & a and component & b:
            return False
    return True


def maximally_connected_components(t: Tree, s: Iterable[int]) -> List[VertexSet]:
    """Components of the subgraph induced by S, ordered by smallest member."""
    s = as_vertex_set(t, s)
    if not s:
        raise InvalidInputError("Components of the empty set are undefined")
    components = [frozenset(c) for c in nx.connected_components(t.graph.subgraph(s))]
    return sorted(components, key=min)


def is_connected_set(t: Tree, s: Iterable[int]) -> bool:
    s = as_vertex_set(t, s)
    return bool(s) and nx.is_connected(t.graph.subgraph(s))


def agglomerate(t: Tree, atoms) -> Tuple[Tree, Dict[Edge, Edge]]:
    """Quotient tree of a partition with connected atoms.

    Atom ``u`` (0-based position in ``atoms``) becomes quotient vertex ``u + 1``.
    Returns the quotient tree and, per quotient edge, the lexicographically
    smallest original edge crossing it.
    """
    atoms = [frozenset(a) for a in getattr(atoms, "atoms", atoms)]
    if len(atoms) < 2:
        raise InvalidPartitionError("Agglomeration needs at least two atoms")
    owner = {}
    for index, atom in enumerate(atoms, start=1):
        if not is_connected_set(t, atom):
            raise InvalidPartitionError(f"Atom {sorted(atom)} is not connected in the tree")
        for v in atom:
            owner[v] = index
    if sorted(owner) != list(range(1, t.m + 1)):
        raise InvalidPartitionError("Atoms do not partition the vertex set")
    witness: Dict[Edge, Edge] = {}
    for i, j in t.edges:
        u, v = owner[i], owner[j]
        if u == v:
            continue
        key = as_edge(u, v)
        if key not in witness or (i, j) < witness[key]:
            witness[key] = (i, j)
    quotient = Tree(len(atoms), tuple(witness))
    logger.debug(f"Agglomerated {t.m}-vertex tree into {quotient.m} atoms")
    return quotient, witness
