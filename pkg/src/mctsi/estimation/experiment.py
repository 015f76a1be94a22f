"""
Bandit experiment grids: an experiment file names a model, a budget schedule,
a trial count and a seed; running it gives one row per (N, trial) and one
summary row per N, written as CSV.

    {"model": "builtin:binary-tree:l=2,p=0.1/0.3",
     "per_edge_exponents": [6, 13], "trials": 500, "seed": 7}
"""

import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from tqdm import tqdm

from ..core.errors import ModelParseError, ModelValidationError, UniquenessError, json_pointer
from ..models.loader import BUILTIN_PREFIX, load_target, model_from_data
from ..models.mct import MctModel
from .bandit import (
    BanditConfig,
    GapProfile,
    error_probability_bound,
    gap_profile,
    monte_carlo_error_rate,
    si_deviation_bound,
)

logger = logging.getLogger(__name__)

TRIALS_FILE = "trials.csv"
SUMMARY_FILE = "summary.csv"

SUMMARY_HEADER = (
    "budget", "per_edge", "trials", "errors", "error_rate", "wilson_low", "wilson_high",
    "mean_abs_si_error", "si_true", "best_edge", "delta_1",
    "proposition_bound", "proposition_raw", "proposition_vacuous", "proposition_valid",
    "deviation_bound", "deviation_vacuous", "deviation_valid",
)


class ExperimentSpec(BaseModel):
    """Schema of an experiment file. Give either ``budgets`` or ``per_edge_exponents``."""
    model_config = ConfigDict(extra="forbid")

    model: Union[str, Dict[str, Any]]
    budgets: Optional[List[int]] = None
    per_edge_exponents: Optional[Tuple[int, int]] = None
    trials: int = Field(default=500, ge=0)
    seed: int = 0
    sampling: Literal["blocks", "independent"] = "blocks"
    epsilon: float = Field(default=0.05, gt=0)

    @model_validator(mode="after")
    def _one_schedule(self):
        if (self.budgets is None) == (self.per_edge_exponents is None):
            raise ValueError("give exactly one of budgets or per_edge_exponents")
        if self.per_edge_exponents is not None:
            low, high = self.per_edge_exponents
            if not 0 <= low <= high:
                raise ValueError("per_edge_exponents must satisfy 0 <= low <= high")
        return self

    def schedule(self, edge_count: int) -> List[int]:
        if self.budgets is not None:
            return list(self.budgets)
        low, high = self.per_edge_exponents
        return [edge_count * 2 ** k for k in range(low, high + 1)]


def loads_experiment(text: str, base_dir: Union[str, Path] = ".") -> Tuple[ExperimentSpec, MctModel]:
    """Parse experiment JSON and resolve its model (paths relative to ``base_dir``)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelParseError(f"Malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    try:
        spec = ExperimentSpec.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        raise ModelValidationError(json_pointer(*error["loc"]), error["msg"])
    if isinstance(spec.model, dict):
        model = model_from_data(spec.model)
    else:
        ref = spec.model
        if not ref.startswith(BUILTIN_PREFIX) and not Path(ref).is_absolute():
            ref = str(Path(base_dir) / ref)
        target = load_target(ref)
        if target.model is None:
            raise ModelValidationError("/model", f"{spec.model} is not a Markov chain on a tree")
        model = target.model
    return spec, model


def load_experiment(path: Union[str, Path]) -> Tuple[ExperimentSpec, MctModel]:
    path = Path(path)
    return loads_experiment(path.read_text(encoding="utf-8"), path.parent)


def edge_label(edge) -> str:
    return f"{edge[0]}-{edge[1]}"


def format_cell(value: Any) -> str:
    """17 significant digits for floats, lower-case booleans, empty for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


@dataclass
class ExperimentResult:
    model: MctModel
    profile: GapProfile
    trial_header: Tuple[str, ...]
    trial_rows: List[list] = field(default_factory=list)
    summary_rows: List[list] = field(default_factory=list)

    def summary_dicts(self) -> List[Dict[str, Any]]:
        return [dict(zip(SUMMARY_HEADER, row)) for row in self.summary_rows]

    def write(self, out_dir: Union[str, Path]) -> List[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return [
            write_csv(out_dir / TRIALS_FILE, self.trial_header, self.trial_rows),
            write_csv(out_dir / SUMMARY_FILE, SUMMARY_HEADER, self.summary_rows),
        ]


def _bound_cells(profile: GapProfile, budget: int, card: int, edge_count: int, epsilon: float) -> list:
    try:
        identify = error_probability_bound(profile, budget, card, edge_count)
        deviation = si_deviation_bound(budget, edge_count, epsilon, profile.delta_1, card)
    except UniquenessError:
        return [None] * 7
    if identify.bound.vacuous:
        logger.debug(f"Misidentification bound is vacuous at N={budget}")
    return [
        identify.bound.value, identify.bound.raw, identify.bound.vacuous, identify.valid,
        deviation.bound.value, deviation.bound.vacuous, deviation.valid,
    ]


def run_experiment(spec: ExperimentSpec, model: MctModel, threads: int = 1,
                   progress: Optional[bool] = None) -> ExperimentResult:
    """
    Run the budget schedule. Trial t at every budget uses stream (seed, t), so the
    output depends only on the spec, never on ``threads``.
    """
    profile = gap_profile(model)
    edges = model.edges
    card = max(model.cards)
    header = ("budget", "trial", "chosen_edge", "si_estimate", "correct") + tuple(
        f"emi_{edge_label(e)}" for e in edges
    )
    result = ExperimentResult(model, profile, header)
    if progress is None:
        progress = sys.stderr.isatty()
    budgets = spec.schedule(len(edges))
    for budget in tqdm(budgets, desc="budgets", file=sys.stderr, disable=not progress):
        cfg = BanditConfig(model, budget, spec.trials, spec.seed, spec.sampling, threads)
        rate = monte_carlo_error_rate(cfg, profile)
        for o in rate.outcomes:
            result.trial_rows.append(
                [budget, o.trial, edge_label(o.chosen_edge), o.si_estimate, o.correct]
                + [o.emi_per_edge[e] for e in edges]
            )
        result.summary_rows.append(
            [budget, cfg.per_edge, rate.trials, rate.errors, rate.rate, rate.wilson_low, rate.wilson_high,
             rate.mean_abs_si_error, profile.si, edge_label(profile.best_edge),
             profile.delta_1 if profile.unique else None]
            + _bound_cells(profile, budget, card, len(edges), spec.epsilon)
        )
        logger.debug(f"N={budget}: error rate {rate.rate}")
    logger.info(f"Ran {len(budgets)} budgets x {spec.trials} trials")
    return result
