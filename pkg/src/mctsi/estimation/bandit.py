"""
Uniform-sampling bandit over tree edges.

Each edge is an arm pair; with a budget of N samples every edge gets n = N/|E|
of them, the edge with the smallest EMI is picked and its EMI is the estimate
of shared information.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.stats import norm

from ..core.errors import InvalidParameterError, UniquenessError
from ..core.rng import make_rng
from ..core.tree import Edge
from ..info.shared_info import TIE_TOL, edge_mutual_informations
from ..models.mct import MctModel, edge_pair_pmf, sample, vertex_marginals
from .bounds import CONCENTRATION_CONSTANT, BoundValue, over_pow2_minus_1
from .emi import PairSamples, emi_from_counts, empirical_mi

logger = logging.getLogger(__name__)

SAMPLING_MODES = ("blocks", "independent")
# ordering exponent 2 n (delta_1/6)^2 / 36 = n delta_1^2 / 648
PROPOSITION_CONSTANT = 648.0


@dataclass(frozen=True)
class BanditConfig:
    model: MctModel
    budget: int
    trials: int = 500
    master_seed: int = 0
    sampling: str = "blocks"
    threads: int = 1

    def __post_init__(self):
        edges = len(self.model.edges)
        if edges < 1:
            raise InvalidParameterError("Bandit needs a tree with at least one edge")
        if self.budget < edges or self.budget % edges:
            raise InvalidParameterError(f"Budget {self.budget} must be a positive multiple of |E|={edges}")
        if self.trials < 0:
            raise InvalidParameterError(f"Trial count must be >= 0, got {self.trials}")
        if self.sampling not in SAMPLING_MODES:
            raise InvalidParameterError(f"Unknown sampling mode {self.sampling!r}; use one of {SAMPLING_MODES}")

    @property
    def per_edge(self) -> int:
        return self.budget // len(self.model.edges)


@dataclass(frozen=True)
class GapProfile:
    """True edge informations and how far each sits above the minimum."""
    true_edge_mi: Dict[Edge, float]
    best_edge: Edge
    deltas: Dict[Edge, float]
    delta_1: float
    unique: bool

    @property
    def si(self) -> float:
        return self.true_edge_mi[self.best_edge]


def gap_profile(model: MctModel) -> GapProfile:
    """Per-edge MI, the lexicographically first minimizer and the gap to the runner-up."""
    mi = dict(sorted(edge_mutual_informations(model).items()))
    lowest = min(mi.values())
    best_edge = next(e for e in mi if mi[e] <= lowest + TIE_TOL)
    values = sorted(mi.values())
    delta_1 = values[1] - values[0] if len(values) > 1 else math.inf
    unique = delta_1 > TIE_TOL
    if not unique:
        logger.warning(f"Minimizing edge is not unique (gap {delta_1:.3g} bits)")
    return GapProfile(mi, best_edge, {e: v - lowest for e, v in mi.items()}, delta_1, unique)


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    emi_per_edge: Dict[Edge, float]
    chosen_edge: Edge
    si_estimate: float
    correct: bool


def _edge_emis_blocks(cfg: BanditConfig, trial_id: int) -> Dict[Edge, float]:
    n = cfg.per_edge
    samples = sample(cfg.model, cfg.budget, make_rng(cfg.master_seed, trial_id))
    return {
        (i, j): empirical_mi(PairSamples.from_matrix(samples, i, j, b * n, (b + 1) * n))
        for b, (i, j) in enumerate(cfg.model.edges)
    }


def _edge_emis_independent(cfg: BanditConfig, trial_id: int) -> Dict[Edge, float]:
    marginals = vertex_marginals(cfg.model)
    emis = {}
    for b, (i, j) in enumerate(cfg.model.edges):
        pair = edge_pair_pmf(cfg.model, i, j, marginals)
        rng = make_rng(cfg.master_seed, trial_id, b + 1)
        counts = rng.multinomial(cfg.per_edge, pair.ravel() / pair.sum()).reshape(pair.shape)
        emis[(i, j)] = float(emi_from_counts(counts))
    return emis


def run_trial(cfg: BanditConfig, trial_id: int, profile: Optional[GapProfile] = None) -> TrialOutcome:
    """
    One bandit run. ``blocks`` draws N full vectors and hands edge b the rows
    b*n..(b+1)*n-1 (edges in lexicographic order); ``independent`` draws each
    edge's n pairs from its own stream. Ties go to the first edge.
    """
    profile = profile if profile is not None else gap_profile(cfg.model)
    if cfg.sampling == "blocks":
        emis = _edge_emis_blocks(cfg, trial_id)
    else:
        emis = _edge_emis_independent(cfg, trial_id)
    chosen = None
    for edge in sorted(emis):
        if chosen is None or emis[edge] < emis[chosen]:
            chosen = edge
    if profile.unique:
        correct = chosen == profile.best_edge
    else:
        correct = profile.true_edge_mi[chosen] <= profile.si + TIE_TOL
    return TrialOutcome(trial_id, emis, chosen, emis[chosen], correct)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion; (0, 1) without trials."""
    if trials == 0:
        return 0.0, 1.0
    z = norm.ppf(0.5 + confidence / 2)
    rate = successes / trials
    denom = 1 + z * z / trials
    centre = (rate + z * z / (2 * trials)) / denom
    half = z * math.sqrt(rate * (1 - rate) / trials + z * z / (4 * trials * trials)) / denom
    low = 0.0 if successes == 0 else max(0.0, float(centre - half))
    high = 1.0 if successes == trials else min(1.0, float(centre + half))
    return low, high


@dataclass
class ErrorRate:
    trials: int
    errors: int
    rate: float
    wilson_low: float
    wilson_high: float
    mean_abs_si_error: float
    outcomes: List[TrialOutcome] = field(default_factory=list, repr=False)

    @property
    def half_width(self) -> float:
        return (self.wilson_high - self.wilson_low) / 2


def monte_carlo_error_rate(cfg: BanditConfig, profile: Optional[GapProfile] = None) -> ErrorRate:
    """Misidentification rate over ``cfg.trials`` trials; trial t always uses stream t."""
    profile = profile if profile is not None else gap_profile(cfg.model)
    if cfg.threads > 1 and cfg.trials > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(lambda t: run_trial(cfg, t, profile), range(cfg.trials)))
    else:
        outcomes = [run_trial(cfg, t, profile) for t in range(cfg.trials)]
    errors = sum(not o.correct for o in outcomes)
    low, high = wilson_interval(errors, cfg.trials)
    if outcomes:
        rate = errors / cfg.trials
        mean_error = float(np.mean([abs(o.si_estimate - profile.si) for o in outcomes]))
    else:
        rate, mean_error = math.nan, math.nan
    logger.debug(f"N={cfg.budget}: {errors}/{cfg.trials} misidentified")
    return ErrorRate(cfg.trials, errors, rate, low, high, mean_error, outcomes)


@dataclass(frozen=True)
class ErrorBound:
    bound: BoundValue
    valid: bool
    threshold: float


def _delta_1(profile: Union[GapProfile, float]) -> float:
    delta_1 = profile.delta_1 if isinstance(profile, GapProfile) else float(profile)
    if not delta_1 > TIE_TOL:
        raise UniquenessError(f"Error bounds need a unique minimizing edge; gap is {delta_1}")
    return delta_1


def proposition_threshold(delta_1: float, card: int, edge_count: int) -> float:
    """N must exceed |E| max{(c^2 - 1)/(2^(delta_1/3) - 1), (c - 1)/(2^(delta_1/6) - 1)}."""
    return edge_count * max(
        over_pow2_minus_1(card * card - 1, delta_1 / 3),
        over_pow2_minus_1(card - 1, delta_1 / 6),
    )


def error_probability_bound(profile: Union[GapProfile, float], budget: int, card: int,
                            edge_count: int) -> ErrorBound:
    """P(chosen edge != best edge) <= 2|E| exp(-n delta_1^2 / (648 log^2 n)), n = N/|E|."""
    delta_1 = _delta_1(profile)
    if edge_count < 1 or card < 2:
        raise InvalidParameterError(f"Need |E| >= 1 and card >= 2, got {edge_count}, {card}")
    n = budget / edge_count
    threshold = proposition_threshold(delta_1, card, edge_count)
    if n <= 1:
        return ErrorBound(BoundValue.of(math.inf), False, threshold)
    raw = 2 * edge_count * math.exp(-n * delta_1 ** 2 / (PROPOSITION_CONSTANT * math.log2(n) ** 2))
    return ErrorBound(BoundValue.of(raw), budget > threshold, threshold)


def si_deviation_bound(budget: int, edge_count: int, epsilon: float, delta_1: float,
                       card: int = 2) -> ErrorBound:
    """
    P(|SI estimate - SI| > epsilon) bound: the concentration term at epsilon/2
    plus the misidentification term. Valid once the misidentification term is
    and n is past the minimum sample size for a bias below epsilon/2.
    """
    delta_1 = _delta_1(delta_1)
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    identify = error_probability_bound(delta_1, budget, card, edge_count)
    n = budget / edge_count
    if n <= 1:
        return ErrorBound(BoundValue.of(math.inf), False, identify.threshold)
    concentrate = math.exp(-2 * n * (epsilon / 2) ** 2 / (CONCENTRATION_CONSTANT * math.log2(n) ** 2))
    bias_ok = math.log2(1 + (card * card - 1) / n) < epsilon / 2
    return ErrorBound(BoundValue.of(concentrate + identify.bound.raw), identify.valid and bias_ok,
                      identify.threshold)


def sample_complexity(epsilon: float, delta: float, delta_1: float, edge_count: int, card: int) -> int:
    """
    Order-level budget for P(|SI estimate - SI| > epsilon) <= delta:
    |E| [c/eps + b log^2 b + d log d + d log^2 d] with b = ln(1/delta)/eps^2 and
    d = ln(|E|/delta)/delta_1^2. Numerical constants are dropped.
    """
    if not 0 < epsilon < 0.5:
        raise InvalidParameterError(f"Sample complexity needs 0 < epsilon < 1/2, got {epsilon}")
    if not 0 < delta < 1 / math.e:
        raise InvalidParameterError(f"Sample complexity needs 0 < delta < 1/e, got {delta}")
    if not delta_1 > 0:
        raise InvalidParameterError(f"Gap must be positive, got {delta_1}")
    if edge_count < 1 or card < 2:
        raise InvalidParameterError(f"Need |E| >= 1 and card >= 2, got {edge_count}, {card}")
    b = math.log(1 / delta) / epsilon ** 2
    d = math.log(edge_count / delta) / delta_1 ** 2
    bracket = card / epsilon + b * math.log2(b) ** 2 + d * math.log2(d) + d * math.log2(d) ** 2
    return math.ceil(edge_count * bracket)
