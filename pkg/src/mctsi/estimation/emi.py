"""
Empirical mutual information (plug-in) estimator.

EMI(x, y) = H(Q_x) + H(Q_y) - H(Q_xy) in bits, where Q are the empirical
types of the paired sequences. Everything here also works on batches of type
counts so Monte Carlo runs can draw whole types with one multinomial call.
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import xlogy

from ..core.errors import InternalConsistencyError, InvalidInputError, InvalidParameterError
from ..core.pmf import PROB_TOL
from ..core.rng import SeedLike, as_rng
from ..models.mct import SampleMatrix

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class PairSamples:
    """n paired symbols (x_t, y_t) with x_t < card_x and y_t < card_y."""
    xs: np.ndarray
    ys: np.ndarray
    card_x: int
    card_y: int

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.int64).ravel()
        ys = np.asarray(self.ys, dtype=np.int64).ravel()
        if xs.shape != ys.shape:
            raise InvalidInputError(f"Paired sequences differ in length: {xs.size} vs {ys.size}")
        if self.card_x < 1 or self.card_y < 1:
            raise InvalidParameterError(f"Alphabet sizes must be positive, got {self.card_x} x {self.card_y}")
        if xs.size and (xs.min() < 0 or xs.max() >= self.card_x or ys.min() < 0 or ys.max() >= self.card_y):
            raise InvalidInputError("Paired symbol outside its alphabet")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return int(self.xs.size)

    @classmethod
    def from_matrix(cls, samples: SampleMatrix, i: int, j: int, start: int = 0, stop=None) -> "PairSamples":
        """Columns of vertices ``i`` and ``j`` over rows ``start:stop``."""
        rows = slice(start, stop)
        return cls(samples.column(i)[rows], samples.column(j)[rows], samples.cards[i - 1], samples.cards[j - 1])

    def replaced(self, index: int, x_new: int, y_new: int) -> "PairSamples":
        """Copy with coordinate ``index`` set to (x_new, y_new)."""
        if not 0 <= index < self.n:
            raise InvalidInputError(f"Index {index} outside 0..{self.n - 1}")
        xs, ys = self.xs.copy(), self.ys.copy()
        xs[index], ys[index] = x_new, y_new
        return PairSamples(xs, ys, self.card_x, self.card_y)


@dataclass(frozen=True, eq=False)
class TypeCounts:
    """Joint type of paired samples as a card_x x card_y count matrix."""
    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def x_counts(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def y_counts(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @classmethod
    def of(cls, s: PairSamples) -> "TypeCounts":
        flat = np.bincount(s.xs * s.card_y + s.ys, minlength=s.card_x * s.card_y)
        return cls(flat.reshape(s.card_x, s.card_y))


def _entropy_of_counts(counts: np.ndarray, n, axes) -> np.ndarray:
    """H of the type with the given counts, reduced over ``axes``; log2 n - sum c log2 c / n."""
    return np.log2(n) - xlogy(counts, counts).sum(axis=axes) / (n * LN2)


def emi_from_counts(counts: np.ndarray) -> np.ndarray:
    """EMI for a batch of joint type counts shaped (..., card_x, card_y)."""
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum(axis=(-2, -1))
    if np.any(n < 1):
        raise InvalidParameterError("EMI needs at least one sample")
    hx = _entropy_of_counts(counts.sum(axis=-1), n, -1)
    hy = _entropy_of_counts(counts.sum(axis=-2), n, -1)
    hxy = _entropy_of_counts(counts, n, (-2, -1))
    value = hx + hy - hxy
    if np.any(value < -PROB_TOL):
        raise InternalConsistencyError(f"Negative empirical mutual information {float(np.min(value))}")
    return np.maximum(value, 0.0)


def empirical_mi(s: Union[PairSamples, TypeCounts]) -> float:
    """Plug-in mutual information of paired samples, in bits."""
    counts = s if isinstance(s, TypeCounts) else TypeCounts.of(s)
    return float(emi_from_counts(counts.counts))


def emi_monte_carlo(pair_pmf: np.ndarray, n: int, trials: int, seed: SeedLike) -> np.ndarray:
    """EMI of ``trials`` independent n-sample types drawn from a pair pmf."""
    pair_pmf = np.asarray(pair_pmf, dtype=np.float64)
    rng = as_rng(seed)
    types = rng.multinomial(n, pair_pmf.ravel() / pair_pmf.sum(), size=trials)
    return emi_from_counts(types.reshape((trials,) + pair_pmf.shape))


def bounded_difference_limit(n: int) -> float:
    """Largest change in EMI from altering one of n coordinates: 6 log2(n) / n."""
    if n < 1:
        raise InvalidParameterError(f"Sample size must be >= 1, got {n}")
    return 6.0 * math.log2(n) / n


def bounded_difference_check(s: PairSamples, index: int, x_new: int, y_new: int) -> float:
    """|EMI(s) - EMI(s with coordinate ``index`` replaced)|."""
    delta = abs(empirical_mi(s) - empirical_mi(s.replaced(index, x_new, y_new)))
    if delta > bounded_difference_limit(s.n) + PROB_TOL:
        logger.warning(f"EMI changed by {delta} on one coordinate of {s.n}; limit {bounded_difference_limit(s.n)}")
    return delta
