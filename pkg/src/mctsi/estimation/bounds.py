"""
Closed-form bounds for the EMI estimator.

Information quantities are in bits and ``log`` inside the bounds is base 2;
every exponential is base e. Probabilities are clamped to 1 and flagged as
vacuous when the raw expression is not below 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from ..core.errors import InvalidParameterError, PreconditionError

logger = logging.getLogger(__name__)

# squared per-coordinate change (6 log n / n)^2 summed over n coordinates
CONCENTRATION_CONSTANT = 36.0


@dataclass(frozen=True)
class BoundValue:
    value: float
    vacuous: bool
    raw: float

    @classmethod
    def of(cls, raw: float) -> "BoundValue":
        return cls(min(raw, 1.0), raw >= 1.0, raw)


def _require_count(n, name: str = "n", minimum: int = 1) -> None:
    if n < minimum:
        raise InvalidParameterError(f"{name} must be >= {minimum}, got {n}")


def over_pow2_minus_1(numerator: float, exponent_bits: float) -> float:
    """numerator / (2**exponent_bits - 1), with 0 once the denominator overflows."""
    try:
        return numerator / math.expm1(exponent_bits * math.log(2.0))
    except OverflowError:
        return 0.0


def emi_bias_bounds(card_x: int, card_y: int, n: int) -> Tuple[float, float]:
    """Bracket on E[EMI] - I for n samples over a card_x x card_y alphabet."""
    _require_count(card_x, "card_x")
    _require_count(card_y, "card_y")
    _require_count(n)
    lower = -(math.log2(1 + (card_x - 1) / n) + math.log2(1 + (card_y - 1) / n))
    upper = math.log2(1 + (card_x * card_y - 1) / n)
    return lower, upper


def _mcdiarmid_exponent(n: float, epsilon: float) -> float:
    return -2.0 * n * epsilon ** 2 / (CONCENTRATION_CONSTANT * math.log2(n) ** 2)


def emi_concentration_bound(n: int, epsilon: float) -> BoundValue:
    """P(EMI - E[EMI] >= epsilon) <= exp(-2 n eps^2 / (36 log^2 n))."""
    if n <= 1:
        raise InvalidParameterError(f"Concentration bound needs n >= 2, got {n}")
    if epsilon < 0:
        raise InvalidParameterError(f"epsilon must be >= 0, got {epsilon}")
    return BoundValue.of(math.exp(_mcdiarmid_exponent(n, epsilon)))


def ordering_error_bound(n: int, delta: float, bias_a: float, bias_b: float) -> BoundValue:
    """
    Probability that two pairs whose informations differ by ``delta`` get their
    EMIs in the wrong order, given the (absolute) biases of each estimate.
    """
    if n <= 1:
        raise InvalidParameterError(f"Ordering bound needs n >= 2, got {n}")
    margins = [delta / 2 - abs(b) for b in (bias_a, bias_b)]
    if min(margins) <= 0:
        raise PreconditionError(
            f"Bias ({bias_a}, {bias_b}) is not below half the gap {delta}; raise n past the minimum sample size"
        )
    return BoundValue.of(2.0 * max(math.exp(_mcdiarmid_exponent(n, margin)) for margin in margins))


def min_samples_for_gap(delta: float, card: int) -> int:
    """Smallest n with n > max{(c^2 - 1)/(2^(delta/2) - 1), (c - 1)/(2^(delta/4) - 1)}."""
    if not delta > 0:
        raise InvalidParameterError(f"Gap must be positive, got {delta}")
    _require_count(card, "card", 2)
    threshold = max(over_pow2_minus_1(card * card - 1, delta / 2), over_pow2_minus_1(card - 1, delta / 4))
    return math.floor(threshold) + 1


def tech_lemma_threshold(c: float) -> float:
    """x >= c ln^2 x holds for every x at or above max{1, 4c ln 2c + 16c ln^2 c}."""
    if c < 1:
        raise InvalidParameterError(f"Threshold is stated for c >= 1, got {c}")
    return max(1.0, 4 * c * math.log(2 * c) + 16 * c * math.log(c) ** 2)


def tech_lemma_holds(c: float, x: float) -> bool:
    return x >= c * math.log(x) ** 2


@dataclass(frozen=True)
class BoundsReport:
    """All single-pair bounds at one operating point."""
    card: int
    n: int
    epsilon: float
    delta: float
    bias_lower: float
    bias_upper: float
    concentration: BoundValue
    ordering: Optional[BoundValue]
    n_min: int

    def to_dict(self):
        return {
            "card": self.card,
            "n": self.n,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "bias_lower": self.bias_lower,
            "bias_upper": self.bias_upper,
            "concentration": self.concentration.value,
            "concentration_vacuous": self.concentration.vacuous,
            "ordering": self.ordering.value if self.ordering else None,
            "ordering_vacuous": self.ordering.vacuous if self.ordering else None,
            "n_min": self.n_min,
        }


def bounds_report(card: int, n: int, epsilon: float, delta: float) -> BoundsReport:
    """
    Bias bracket, concentration and ordering bounds for a square ``card`` alphabet.

    The ordering bound uses the larger bias magnitude for both pairs and is None
    until that bias drops below half the gap.
    """
    lower, upper = emi_bias_bounds(card, card, n)
    bias = max(-lower, upper)
    try:
        ordering = ordering_error_bound(n, delta, bias, bias)
    except PreconditionError as e:
        logger.debug(f"No ordering bound at n={n}: {e}")
        ordering = None
    return BoundsReport(
        card=card, n=n, epsilon=epsilon, delta=delta,
        bias_lower=lower, bias_upper=upper,
        concentration=emi_concentration_bound(n, epsilon),
        ordering=ordering,
        n_min=min_samples_for_gap(delta, card),
    )
