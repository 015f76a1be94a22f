"""
Model generators: the balanced binary-tree family, fixed fixtures used by the
CLI and the tests, and random trees, MCTs, pmfs and connected partitions.
"""

import logging
from typing import Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..core.errors import InvalidParameterError, InvalidPartitionError
from ..core.partition import Partition
from ..core.pmf import JointPmf
from ..core.tree import Tree
from .mct import MctModel

logger = logging.getLogger(__name__)


def binary_symmetric_kernel(flip: float) -> np.ndarray:
    return np.array([[1.0 - flip, flip], [flip, 1.0 - flip]])


def example_binary_tree(l: int, p: Sequence[float]) -> MctModel:
    """
    Balanced binary tree with ``l`` levels and m = 2**l - 1 binary vertices.

    Vertex 1 is a fair bit; vertex i >= 2 hangs below i // 2 and equals its
    parent flipped with probability p[i - 2].
    """
    if l < 1:
        raise InvalidParameterError(f"Binary tree needs at least one level, got l={l}")
    m = 2 ** l - 1
    p = [float(x) for x in p]
    if len(p) != m - 1:
        raise InvalidParameterError(f"Binary tree with l={l} needs {m - 1} flip probabilities, got {len(p)}")
    for index, flip in enumerate(p):
        if not 0.0 < flip < 0.5:
            raise InvalidParameterError(f"Flip probability p[{index}]={flip} must lie in (0, 0.5)")
    tree = Tree(m, tuple((i // 2, i) for i in range(2, m + 1)))
    kernels = {i: binary_symmetric_kernel(p[i - 2]) for i in range(2, m + 1)}
    return MctModel(tree=tree, root=1, cards=(2,) * m, root_pmf=np.array([0.5, 0.5]), kernels=kernels)


def chain3() -> MctModel:
    """Fair bit passed down the path 1-2-3 through flips 0.1 then 0.2."""
    return MctModel(
        tree=Tree.path(3),
        root=1,
        cards=(2, 2, 2),
        root_pmf=np.array([0.5, 0.5]),
        kernels={2: binary_symmetric_kernel(0.1), 3: binary_symmetric_kernel(0.2)},
    )


def product_model(m: int = 3) -> MctModel:
    """Independent fair bits on a path; every edge carries zero information."""
    independent = np.full((2, 2), 0.5)
    return MctModel(
        tree=Tree.path(m),
        root=1,
        cards=(2,) * m,
        root_pmf=np.array([0.5, 0.5]),
        kernels={j: independent for j in range(2, m + 1)},
    )


def local_not_global_pmf() -> Tuple[JointPmf, Tree]:
    """
    Locally but not globally Markov law on the path U - W - X - Y - Z.

    U and Z are independent fair bits, W = U, Y = Z and X = W * Y; the
    vertices are numbered 1..5 in that order.
    """
    tensor = np.zeros((2, 2, 2, 2, 2))
    for u in (0, 1):
        for z in (0, 1):
            tensor[u, u, u * z, z, z] = 0.25
    return JointPmf.from_tensor(range(1, 6), tensor), Tree.path(5)


def random_tree(m: int, rng: np.random.Generator) -> Tree:
    """Uniformly random labelled tree on 1..m via a Pruefer sequence."""
    if m < 1:
        raise InvalidParameterError(f"Tree needs at least one vertex, got m={m}")
    if m == 1:
        return Tree(1, ())
    if m == 2:
        return Tree(2, ((1, 2),))
    graph = nx.from_prufer_sequence([int(x) for x in rng.integers(0, m, size=m - 2)])
    return Tree(m, tuple((i + 1, j + 1) for i, j in graph.edges()))


def random_stochastic(rows: int, cols: int, rng: np.random.Generator, alpha: float = 1.0) -> np.ndarray:
    """Row-stochastic matrix with Dirichlet(alpha) rows; full support almost surely."""
    matrix = rng.dirichlet(np.full(cols, alpha), size=rows)
    # Dirichlet rows can land a hair off 1 after float rounding
    return matrix / matrix.sum(axis=1, keepdims=True)


def random_mct(m: int, rng: np.random.Generator, cards: Sequence[int] = (2, 3),
               tree: Optional[Tree] = None, root: int = 1, alpha: float = 1.0) -> MctModel:
    """Random MCT: random tree (unless given), per-vertex card drawn from ``cards``, Dirichlet kernels."""
    tree = tree if tree is not None else random_tree(m, rng)
    vertex_cards = tuple(int(c) for c in rng.choice(np.asarray(cards), size=tree.m))
    parent = tree.parents(root)
    root_pmf = random_stochastic(1, vertex_cards[root - 1], rng, alpha)[0]
    kernels = {
        j: random_stochastic(vertex_cards[i - 1], vertex_cards[j - 1], rng, alpha)
        for j, i in parent.items()
    }
    return MctModel(tree=tree, root=root, cards=vertex_cards, root_pmf=root_pmf, kernels=kernels)


def random_chain(m: int, rng: np.random.Generator, cards: Sequence[int] = (2, 3)) -> MctModel:
    """Random Markov chain X_1 - X_2 - ... - X_m."""
    return random_mct(m, rng, cards=cards, tree=Tree.path(m))


def random_pmf(cards: Sequence[int], rng: np.random.Generator, alpha: float = 1.0) -> JointPmf:
    """Dirichlet-random joint pmf over variables 1..len(cards)."""
    cards = tuple(int(c) for c in cards)
    probs = rng.dirichlet(np.full(int(np.prod(cards)), alpha))
    return JointPmf(tuple(range(1, len(cards) + 1)), cards, probs / probs.sum())


def random_connected_partition(tree: Tree, k: int, rng: np.random.Generator) -> Partition:
    """Partition into ``k`` connected atoms by cutting k - 1 random tree edges."""
    if not 1 <= k <= tree.m:
        raise InvalidPartitionError(f"Cannot split {tree.m} vertices into {k} connected atoms")
    picks = rng.choice(len(tree.edges), size=k - 1, replace=False) if k > 1 else []
    cut = [tree.edges[int(index)] for index in picks]
    forest = nx.restricted_view(tree.graph, [], cut)
    return Partition(tuple(frozenset(c) for c in nx.connected_components(forest)))
