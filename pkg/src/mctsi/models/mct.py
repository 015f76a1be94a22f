"""
Markov chains on trees (MCTs).

An MctModel stores the factorized law: a root pmf and, for every non-root
vertex j, a row-stochastic kernel P(X_j | X_parent(j)) with the tree oriented
away from the root.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from ..core.errors import ModelValidationError, SizeLimitError, json_pointer
from ..core.pmf import DEFAULT_DENSE_GUARD, PROB_TOL, JointPmf
from ..core.rng import SeedLike, as_rng
from ..core.tree import Edge, Tree

logger = logging.getLogger(__name__)

# Accepted rows whose sum is further than this from 1 are rescaled on load.
RENORMALIZE_SLACK = 1e-15


def _check_distribution(values: np.ndarray, path: str, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise ModelValidationError(path, f"{what} contains non-finite entries")
    negative = np.flatnonzero(values < 0.0)
    if negative.size:
        raise ModelValidationError(f"{path}/{negative[0]}", f"{what} has a negative entry")
    total = float(values.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise ModelValidationError(path, f"{what} sums to {total!r}, not 1")


def _renormalized(values: np.ndarray) -> np.ndarray:
    """Rescale the last axis to sum to 1 when it drifts by more than a few ulps."""
    totals = values.sum(axis=-1, keepdims=True)
    return np.where(np.abs(totals - 1.0) > RENORMALIZE_SLACK, values / totals, values)


@dataclass(frozen=True, eq=False)
class MctModel:
    """Root pmf plus per-edge conditional kernels oriented away from the root."""
    tree: Tree
    root: int
    cards: Tuple[int, ...]
    root_pmf: np.ndarray
    kernels: Mapping[int, np.ndarray]
    parent: Dict[int, int] = field(init=False, repr=False)
    order: Tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        tree, m = self.tree, self.tree.m
        root = int(self.root)
        if not 1 <= root <= m:
            raise ModelValidationError("/root", f"root {root} outside 1..{m}")
        cards = tuple(int(c) for c in self.cards)
        if len(cards) != m:
            raise ModelValidationError("/cards", f"expected {m} cardinalities, got {len(cards)}")
        for index, card in enumerate(cards):
            if card < 1:
                raise ModelValidationError(json_pointer("cards", index), "cardinality must be >= 1")

        root_pmf = np.array(self.root_pmf, dtype=np.float64)
        if root_pmf.shape != (cards[root - 1],):
            raise ModelValidationError(
                "/root_pmf", f"expected {cards[root - 1]} entries for root {root}, got {root_pmf.size}"
            )
        _check_distribution(root_pmf, "/root_pmf", "root pmf")

        parent = tree.parents(root)
        expected = set(parent)
        given = {int(j) for j in self.kernels}
        if given != expected:
            missing, extra = sorted(expected - given), sorted(given - expected)
            where = json_pointer("kernels", (missing or extra)[0])
            raise ModelValidationError(
                where, f"kernels must cover exactly the non-root vertices (missing {missing}, extra {extra})"
            )
        kernels = {}
        for j, raw in self.kernels.items():
            j = int(j)
            try:
                kernel = np.array(raw, dtype=np.float64)
            except ValueError:
                raise ModelValidationError(
                    json_pointer("kernels", j), "kernel rows must all have the same length"
                ) from None
            shape = (cards[parent[j] - 1], cards[j - 1])
            if kernel.shape != shape:
                raise ModelValidationError(
                    json_pointer("kernels", j),
                    f"kernel of vertex {j} must be {shape[0]}x{shape[1]} (parent {parent[j]}), got {kernel.shape}",
                )
            for row_index, row in enumerate(kernel):
                _check_distribution(row, json_pointer("kernels", j, row_index), f"row {row_index} of kernel {j}")
            kernel = _renormalized(kernel)
            kernel.setflags(write=False)
            kernels[j] = kernel
        root_pmf = _renormalized(root_pmf)
        root_pmf.setflags(write=False)

        object.__setattr__(self, "root", root)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "root_pmf", root_pmf)
        object.__setattr__(self, "kernels", kernels)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "order", tuple(tree.bfs_order(root)))

    @property
    def m(self) -> int:
        return self.tree.m

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self.tree.edges

    @property
    def n_states(self) -> int:
        return math.prod(self.cards)

    def to_dict(self) -> Dict[str, Any]:
        """Serializable form matching the model-file layout."""
        return {
            "m": self.m,
            "cards": list(self.cards),
            "edges": [list(e) for e in self.edges],
            "root": self.root,
            "root_pmf": [float(x) for x in self.root_pmf],
            "kernels": {str(j): self.kernels[j].tolist() for j in sorted(self.kernels)},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MctModel":
        tree = Tree(int(data["m"]), tuple(tuple(e) for e in data["edges"]))
        return cls(
            tree=tree,
            root=int(data["root"]),
            cards=tuple(data["cards"]),
            root_pmf=np.asarray(data["root_pmf"], dtype=np.float64),
            kernels={int(j): np.asarray(k, dtype=np.float64) for j, k in data["kernels"].items()},
        )


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """n i.i.d. draws of X_M; column v-1 holds vertex v."""
    values: np.ndarray
    cards: Tuple[int, ...]

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2 or values.shape[1] != len(self.cards):
            raise ValueError(f"Sample matrix must be n x {len(self.cards)}, got {values.shape}")
        if values.size and (values.min() < 0 or np.any(values.max(axis=0) >= np.asarray(self.cards))):
            raise ValueError("Sample symbol outside its vertex alphabet")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, vertex: int) -> np.ndarray:
        return self.values[:, vertex - 1]


def joint_pmf(model: MctModel, max_states: int = DEFAULT_DENSE_GUARD) -> JointPmf:
    """Materialize P(x) = root_pmf(x_root) * prod_j kernel_j(x_j | x_parent(j))."""
    if model.n_states > max_states:
        raise SizeLimitError(
            f"Model has {model.n_states} joint states, above the dense guard of {max_states}"
        )
    axes = [model.root]
    tensor = np.array(model.root_pmf)
    for j in model.order[1:]:
        p = model.parent[j]
        kernel = model.kernels[j]
        shape = [1] * len(axes)
        shape[axes.index(p)] = kernel.shape[0]
        tensor = tensor[..., np.newaxis] * kernel.reshape(shape + [kernel.shape[1]])
        axes.append(j)
    tensor = np.transpose(tensor, [axes.index(v) for v in range(1, model.m + 1)])
    return JointPmf.from_tensor(range(1, model.m + 1), tensor, max_states=max_states)


def vertex_marginals(model: MctModel) -> Dict[int, np.ndarray]:
    """Single-vertex marginals, pushing the root pmf down the tree."""
    marginals = {model.root: np.array(model.root_pmf)}
    for j in model.order[1:]:
        marginals[j] = marginals[model.parent[j]] @ model.kernels[j]
    return marginals


def edge_pair_pmf(model: MctModel, i: int, j: int, marginals=None) -> np.ndarray:
    """Pair pmf P(X_i, X_j) of an edge as a card_i x card_j matrix, without the dense joint."""
    marginals = marginals if marginals is not None else vertex_marginals(model)
    if model.parent.get(j) == i:
        return marginals[i][:, np.newaxis] * model.kernels[j]
    if model.parent.get(i) == j:
        return (marginals[j][:, np.newaxis] * model.kernels[i]).T
    raise ValueError(f"({i},{j}) is not an edge of the model tree")


def _draw(cumulative: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw: row-wise count of cumulative entries below u."""
    symbols = (u[:, np.newaxis] >= cumulative).sum(axis=1)
    return np.minimum(symbols, cumulative.shape[-1] - 1)


def sample(model: MctModel, n: int, seed: SeedLike) -> SampleMatrix:
    """n i.i.d. vectors by ancestral sampling in BFS order from the root."""
    if n < 1:
        raise ValueError(f"Sample size must be >= 1, got {n}")
    rng = as_rng(seed)
    values = np.zeros((n, model.m), dtype=np.int64)
    root_cdf = np.cumsum(model.root_pmf)
    values[:, model.root - 1] = _draw(np.broadcast_to(root_cdf, (n, root_cdf.size)), rng.random(n))
    for j in model.order[1:]:
        parent_values = values[:, model.parent[j] - 1]
        cdf = np.cumsum(model.kernels[j], axis=1)[parent_values]
        values[:, j - 1] = _draw(cdf, rng.random(n))
    logger.debug(f"Drew {n} samples from {model.m}-vertex model")
    return SampleMatrix(values, model.cards)
