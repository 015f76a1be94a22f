"""
Exact discrete probability arithmetic.
Joint pmfs over product alphabets, marginalization and base-2 information measures.

Probabilities are stored as a flat vector in mixed-radix order with the last
variable varying fastest (numpy C order), so ``probs.reshape(cards)`` is the
joint tensor with one axis per variable.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidKeyError, InvalidParameterError, SizeLimitError

logger = logging.getLogger(__name__)

PROB_TOL = 1e-12  # sum-to-one and clamp tolerance
DEFAULT_DENSE_GUARD = 2 ** 24
MAX_TABLE_VARIABLES = 20


def clamp_bits(value: float, what: str = "information") -> float:
    """Clamp tiny negative values from floating cancellation to zero.

    Values below -PROB_TOL are returned unchanged (and logged); they point at a bug upstream.
    """
    value = float(value)
    if value < 0.0:
        if value >= -PROB_TOL:
            return 0.0
        logger.warning(f"Negative {what} {value:.3e} bits exceeds clamp tolerance")
    return value


def entropy_bits(probs) -> float:
    """Shannon entropy in bits of a probability array, with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=np.float64).ravel()
    nz = p[p > 0.0]
    if nz.size == 0:
        return 0.0
    return max(-float(np.sum(nz * np.log2(nz))), 0.0)


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Dense joint pmf over an ordered list of variables."""
    variables: Tuple[int, ...]
    cards: Tuple[int, ...]
    probs: np.ndarray
    max_states: int = field(default=DEFAULT_DENSE_GUARD, repr=False)

    def __post_init__(self):
        variables = tuple(int(v) for v in self.variables)
        cards = tuple(int(c) for c in self.cards)
        if len(variables) != len(cards):
            raise InvalidParameterError(
                f"{len(variables)} variables but {len(cards)} cardinalities"
            )
        if len(set(variables)) != len(variables):
            raise InvalidKeyError(f"Duplicate variable ids in {variables}")
        if any(c < 1 for c in cards):
            raise InvalidParameterError(f"Alphabet cardinalities must be >= 1, got {cards}")
        n_states = math.prod(cards)
        if n_states > self.max_states:
            raise SizeLimitError(
                f"Joint pmf needs {n_states} states, above the dense guard of {self.max_states}"
            )
        probs = np.array(self.probs, dtype=np.float64).ravel()
        if probs.size != n_states:
            raise InvalidParameterError(
                f"Expected {n_states} probabilities for cards {cards}, got {probs.size}"
            )
        if not np.all(np.isfinite(probs)) or np.any(probs < 0.0):
            raise InvalidParameterError("Probabilities must be finite and non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidParameterError(f"Probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "probs", probs)

    @property
    def m(self) -> int:
        return len(self.variables)

    @property
    def n_states(self) -> int:
        return self.probs.size

    @property
    def tensor(self) -> np.ndarray:
        """Read-only view with one axis per variable."""
        return self.probs.reshape(self.cards)

    def axis_of(self, variable: int) -> int:
        try:
            return self.variables.index(variable)
        except ValueError:
            raise InvalidKeyError(f"Variable {variable} not in pmf over {self.variables}")

    def card_of(self, variable: int) -> int:
        return self.cards[self.axis_of(variable)]

    @classmethod
    def from_tensor(cls, variables: Sequence[int], tensor, **kwargs) -> "JointPmf":
        tensor = np.asarray(tensor, dtype=np.float64)
        return cls(tuple(variables), tuple(tensor.shape), tensor.ravel(), **kwargs)

    @classmethod
    def uniform(cls, variables: Sequence[int], cards: Sequence[int]) -> "JointPmf":
        n_states = math.prod(cards)
        return cls(tuple(variables), tuple(cards), np.full(n_states, 1.0 / n_states))

    @classmethod
    def point_mass(cls, variables: Sequence[int], cards: Sequence[int], outcome: Sequence[int]) -> "JointPmf":
        probs = np.zeros(tuple(cards))
        probs[tuple(outcome)] = 1.0
        return cls(tuple(variables), tuple(cards), probs.ravel())

    @classmethod
    def product(cls, factors: Iterable["JointPmf"]) -> "JointPmf":
        """Independent product of pmfs over disjoint variable sets."""
        variables: List[int] = []
        tensor = np.ones(())
        for factor in factors:
            overlap = set(variables) & set(factor.variables)
            if overlap:
                raise InvalidKeyError(f"Factors share variables {sorted(overlap)}")
            variables.extend(factor.variables)
            tensor = np.multiply.outer(tensor, factor.tensor)
        return cls.from_tensor(variables, tensor)


@dataclass(frozen=True)
class MarginalKey:
    """Ordered, duplicate-free, nonempty selection of variables."""
    subset: Tuple[int, ...]

    def __post_init__(self):
        subset = tuple(int(v) for v in self.subset)
        if not subset:
            raise InvalidKeyError("Marginal key must name at least one variable")
        if len(set(subset)) != len(subset):
            raise InvalidKeyError(f"Marginal key {subset} repeats a variable")
        object.__setattr__(self, "subset", subset)

    def check(self, p: JointPmf) -> "MarginalKey":
        missing = [v for v in self.subset if v not in p.variables]
        if missing:
            raise InvalidKeyError(f"Variables {missing} not in pmf over {p.variables}")
        return self

    def isdisjoint(self, other: "MarginalKey") -> bool:
        return set(self.subset).isdisjoint(other.subset)

    def __add__(self, other: "MarginalKey") -> "MarginalKey":
        return MarginalKey(self.subset + other.subset)


KeyLike = Union[MarginalKey, Sequence[int], int]


def as_key(key: KeyLike) -> MarginalKey:
    if isinstance(key, MarginalKey):
        return key
    if isinstance(key, (int, np.integer)):
        return MarginalKey((int(key),))
    return MarginalKey(tuple(key))


def _marginal_tensor(p: JointPmf, variables: Sequence[int]) -> np.ndarray:
    keep = [p.axis_of(v) for v in variables]
    drop = tuple(ax for ax in range(p.m) if ax not in keep)
    tensor = p.tensor.sum(axis=drop) if drop else p.tensor
    kept_sorted = sorted(keep)
    return np.transpose(tensor, [kept_sorted.index(ax) for ax in keep])


def _require_disjoint(*keys: MarginalKey) -> None:
    seen = set()
    for key in keys:
        overlap = seen & set(key.subset)
        if overlap:
            raise InvalidKeyError(f"Keys overlap on variables {sorted(overlap)}")
        seen |= set(key.subset)


def marginalize(p: JointPmf, key: KeyLike) -> JointPmf:
    """Marginal pmf of ``p`` on the key's variables, in key order."""
    key = as_key(key).check(p)
    tensor = _marginal_tensor(p, key.subset)
    return JointPmf(key.subset, tensor.shape, tensor.ravel(), max_states=p.max_states)


def subset_entropy(p: JointPmf, variables: Sequence[int]) -> float:
    """H(X_A) in bits; the empty set has entropy 0."""
    if not variables:
        return 0.0
    return entropy_bits(_marginal_tensor(p, list(variables)))


def entropy(p: JointPmf) -> float:
    return entropy_bits(p.probs)


def mutual_information(p: JointPmf, a: KeyLike, b: KeyLike) -> float:
    """I(A ; B) = H(A) + H(B) - H(A, B) in bits."""
    a, b = as_key(a).check(p), as_key(b).check(p)
    _require_disjoint(a, b)
    value = subset_entropy(p, a.subset) + subset_entropy(p, b.subset) - subset_entropy(p, (a + b).subset)
    return clamp_bits(value, "mutual information")


def conditional_mutual_information(p: JointPmf, a: KeyLike, b: KeyLike, s: KeyLike) -> float:
    """I(A ; B | S) = H(A,S) + H(B,S) - H(A,B,S) - H(S) in bits."""
    a, b, s = as_key(a).check(p), as_key(b).check(p), as_key(s).check(p)
    _require_disjoint(a, b, s)
    value = (
        subset_entropy(p, (a + s).subset)
        + subset_entropy(p, (b + s).subset)
        - subset_entropy(p, (a + b + s).subset)
        - subset_entropy(p, s.subset)
    )
    return clamp_bits(value, "conditional mutual information")


def kl_divergence(p: JointPmf, q: JointPmf) -> float:
    """D(p || q) in bits; ``math.inf`` when p is not absolutely continuous w.r.t. q."""
    if p.variables != q.variables or p.cards != q.cards:
        raise InvalidKeyError(
            f"Divergence needs matching variables/cards, got {p.variables}{p.cards} vs {q.variables}{q.cards}"
        )
    support = p.probs > 0.0
    if np.any(q.probs[support] == 0.0):
        logger.debug("Support of p not contained in support of q; divergence is infinite")
        return math.inf
    pp, qq = p.probs[support], q.probs[support]
    value = float(np.sum(pp * (np.log2(pp) - np.log2(qq))))
    return clamp_bits(value, "divergence")


def group_variables(p: JointPmf, groups: Sequence[Sequence[int]],
                    labels: Optional[Sequence[int]] = None) -> JointPmf:
    """Joint pmf of the grouped super-variables (X_{g_1}, ..., X_{g_k}).

    Each group becomes one variable whose symbol is the mixed-radix index of the
    group's values (in the listed order). Groups must cover ``p.variables`` disjointly.
    Labels default to 1..k.
    """
    flat = [int(v) for group in groups for v in group]
    if sorted(flat) != sorted(p.variables) or len(set(flat)) != len(flat):
        raise InvalidKeyError(f"Groups {groups} do not partition variables {p.variables}")
    if any(len(group) == 0 for group in groups):
        raise InvalidKeyError("Groups must be nonempty")
    tensor = np.transpose(p.tensor, [p.axis_of(v) for v in flat])
    cards = [math.prod(p.card_of(v) for v in group) for group in groups]
    labels = tuple(labels) if labels is not None else tuple(range(1, len(groups) + 1))
    return JointPmf(labels, tuple(cards), np.ascontiguousarray(tensor).ravel(), max_states=p.max_states)


class SubsetEntropies:
    """
    Table of H(X_A) for every subset A of a pmf's variables, indexed by bitmask
    (bit i <-> ``p.variables[i]``).

    Built once by a depth-first walk that sums out one axis at a time, so the
    total work is prod(1 + card_i) rather than 2^m full marginalizations.
    Read-only afterwards and safe to share between threads.
    """

    def __init__(self, p: JointPmf):
        if p.m > MAX_TABLE_VARIABLES:
            raise SizeLimitError(
                f"Subset-entropy table over {p.m} variables exceeds {MAX_TABLE_VARIABLES}"
            )
        self.pmf = p
        self._bits: Dict[int, int] = {v: 1 << i for i, v in enumerate(p.variables)}
        self._table = np.zeros(1 << p.m)
        self._walk(p.tensor, list(range(p.m)), (1 << p.m) - 1, 0)
        self._table.setflags(write=False)
        logger.debug(f"Built subset-entropy table for {p.m} variables")

    def _walk(self, tensor: np.ndarray, positions: List[int], mask: int, start: int) -> None:
        self._table[mask] = entropy_bits(tensor)
        for idx in range(start, len(positions)):
            child = tensor.sum(axis=idx)
            rest = positions[:idx] + positions[idx + 1:]
            self._walk(child, rest, mask & ~(1 << positions[idx]), idx)

    def mask(self, variables: Iterable[int]) -> int:
        mask = 0
        for v in variables:
            try:
                mask |= self._bits[v]
            except KeyError:
                raise InvalidKeyError(f"Variable {v} not in pmf over {self.pmf.variables}")
        return mask

    def h_mask(self, mask: int) -> float:
        return float(self._table[mask])

    def h(self, variables: Iterable[int]) -> float:
        return float(self._table[self.mask(variables)])

    def mi(self, a: Iterable[int], b: Iterable[int]) -> float:
        ma, mb = self.mask(a), self.mask(b)
        if ma & mb:
            raise InvalidKeyError("Mutual information keys overlap")
        return clamp_bits(self.h_mask(ma) + self.h_mask(mb) - self.h_mask(ma | mb))

    def cmi_masks(self, ma: int, mb: int, ms: int) -> float:
        value = (
            self.h_mask(ma | ms) + self.h_mask(mb | ms)
            - self.h_mask(ma | mb | ms) - self.h_mask(ms)
        )
        return clamp_bits(value, "conditional mutual information")

    def cmi(self, a: Iterable[int], b: Iterable[int], s: Iterable[int] = ()) -> float:
        ma, mb, ms = self.mask(a), self.mask(b), self.mask(s)
        if ma & mb or ma & ms or mb & ms:
            raise InvalidKeyError("Conditional mutual information keys overlap")
        if not ma or not mb:
            return 0.0
        return self.cmi_masks(ma, mb, ms)
