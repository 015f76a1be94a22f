"""
Subcommand implementations. Each takes the parsed arguments and the resolved
config, prints its report to stdout and returns the exit code.
"""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

from ..config import MctsiConfig
from ..core.errors import InvalidParameterError, PreconditionError, SizeLimitError
from ..estimation.bandit import error_probability_bound, sample_complexity
from ..estimation.bounds import emi_bias_bounds, emi_concentration_bound, ordering_error_bound
from ..estimation.experiment import format_cell, load_experiment, run_experiment, write_csv
from ..info.shared_info import SiResult, si_brute_force, si_mct
from ..models.loader import ModelTarget, load_target
from ..models.mct import sample
from ..tools import SUITE_NAMES, get_suite
from .manifest import MANIFEST_FILE, RunManifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_PRECONDITION = 4
EXIT_IO = 5

SAMPLES_FILE = "samples.csv"
BOUND_FAMILIES = ("bias", "concentration", "ordering", "proposition", "complexity")


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def emit(args, text: str, data: Any) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True, default=_json_default))
    else:
        print(text)


def format_table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [list(header)] + [[_short_cell(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)


def _short_cell(value: Any) -> str:
    if isinstance(value, float) and math.isfinite(value):
        return format(value, ".7g")
    return format_cell(value)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue().rstrip("\n")


def _require_model(target: ModelTarget, what: str):
    if target.model is None:
        raise PreconditionError(f"{what} needs a Markov chain on a tree; {target.name} is a bare pmf")
    return target.model


def _master_seed(args) -> int:
    return args.seed if args.seed is not None else 0


def _validation_checks(target: ModelTarget) -> List[Dict[str, str]]:
    m = target.tree.m
    checks = [{"path": "/edges", "check": f"tree with {m - 1} edges on {m} vertices"}]
    model = target.model
    if model is None:
        pmf = target.pmf
        checks.append({"path": "/cards", "check": f"cardinalities {list(pmf.cards)}"})
        checks.append({"path": "/pmf", "check": f"non-negative, sums to 1 over {pmf.probs.size} states"})
        return checks
    checks.append({"path": "/cards", "check": f"{m} cardinalities {list(model.cards)}, all >= 1"})
    checks.append({"path": "/root", "check": f"vertex {model.root} in 1..{m}"})
    checks.append({"path": "/root_pmf", "check": f"{model.root_pmf.size} entries, non-negative, sums to 1"})
    for j in sorted(model.kernels):
        rows, cols = model.kernels[j].shape
        checks.append({
            "path": f"/kernels/{j}",
            "check": f"{rows}x{cols} row-stochastic kernel from parent {model.parent[j]}",
        })
    return checks


def cmd_validate(args, config: MctsiConfig) -> int:
    target = load_target(args.model)
    kind = "mct" if target.model is not None else "pmf"
    checks = _validation_checks(target)
    data = {
        "valid": True,
        "target": target.name,
        "kind": kind,
        "m": target.tree.m,
        "edges": [list(e) for e in target.tree.edges],
        "checks": checks,
    }
    if target.model is not None:
        data["cards"] = list(target.model.cards)
        data["root"] = target.model.root
    lines = [f"{target.name}: valid {kind} on {target.tree.m} vertices, edges {list(target.tree.edges)}"]
    lines += [f"  ok  {c['path']}: {c['check']}" for c in checks]
    emit(args, "\n".join(lines), data)
    return EXIT_OK


def _si_dict(result: SiResult) -> Dict[str, Any]:
    return {
        "value_bits": result.value_bits,
        "argmin_edge": list(result.argmin_edge) if result.argmin_edge else None,
        "argmin_partition": str(result.argmin_partition) if result.argmin_partition else None,
        "evaluated": result.evaluated,
    }


def cmd_si(args, config: MctsiConfig) -> int:
    target = load_target(args.model)
    results: Dict[str, SiResult] = {}
    if args.method in ("exact", "both"):
        results["exact"] = si_mct(_require_model(target, "The closed form"))
    if args.method in ("brute", "both"):
        if target.tree.m > config.enumeration_guard:
            # fail before the dense joint is built
            raise SizeLimitError(
                f"Brute force over {target.tree.m} variables exceeds the enumeration guard of {config.enumeration_guard}"
            )
        results["brute"] = si_brute_force(
            target.joint(config.dense_state_guard), guard=config.enumeration_guard, threads=config.threads
        )
    data: Dict[str, Any] = {"target": target.name, "m": target.tree.m,
                            "results": {k: _si_dict(v) for k, v in results.items()}}
    if target.model is not None:
        data["model"] = target.model.to_dict()
    lines = []
    for method, r in results.items():
        where = f"edge {r.argmin_edge}" if r.argmin_edge else f"partition {r.argmin_partition}"
        lines.append(f"{method}: SI = {r.value_bits:.9f} bits at {where}")
    if len(results) == 2:
        delta = abs(results["exact"].value_bits - results["brute"].value_bits)
        data["agreement_delta"] = delta
        lines.append(f"agreement delta: {delta:.3g} bits")
        if delta > config.tol:
            logger.warning(f"Closed form and brute force differ by {delta:.3g} bits")
    emit(args, "\n".join(lines), data)
    return EXIT_OK


def cmd_verify(args, config: MctsiConfig) -> int:
    target = load_target(args.model)
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    results = [
        get_suite(name).run(target, config, mode=args.mode, count=args.count, seed=_master_seed(args))
        for name in names
    ]
    passed = all(r.passed for r in results)
    rows = [[r.suite, "PASS" if r.passed else "FAIL", r.worst, r.summary] for r in results]
    data = {"target": target.name, "passed": passed, "tol": config.tol, "suites": [r.to_dict() for r in results]}
    emit(args, format_table(("suite", "status", "worst", "summary"), rows), data)
    if not passed:
        logger.error(f"{sum(not r.passed for r in results)} of {len(results)} suites failed on {target.name}")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_sample(args, config: MctsiConfig) -> int:
    target = load_target(args.model)
    model = _require_model(target, "Sampling")
    seed = _master_seed(args)
    samples = sample(model, args.n, seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = write_csv(out_dir / SAMPLES_FILE, [f"v{v}" for v in range(1, model.m + 1)], samples.values.tolist())
    run_config = {"command": "sample", "model": model.to_dict(), "n": args.n, "seed": seed}
    manifest = RunManifest.create("sample", run_config, seed, [path]).write(out_dir / MANIFEST_FILE)
    emit(args, f"Wrote {samples.n} samples of {model.m} vertices to {path}",
         {"samples": str(path), "manifest": str(manifest), "n": samples.n})
    return EXIT_OK


def cmd_estimate(args, config: MctsiConfig) -> int:
    spec, model = load_experiment(args.experiment)
    if args.seed is not None:
        spec = spec.model_copy(update={"seed": args.seed})
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_experiment(spec, model, threads=config.threads)
    outputs = result.write(out_dir)
    run_config = {"command": "estimate", "experiment": spec.model_dump(mode="json"), "model": model.to_dict()}
    manifest = RunManifest.create("estimate", run_config, spec.seed, outputs).write(out_dir / MANIFEST_FILE)
    rows = [[d["budget"], d["trials"], d["errors"], d["error_rate"], d["wilson_low"], d["wilson_high"],
             d["mean_abs_si_error"], d["proposition_bound"]] for d in result.summary_dicts()]
    header = ("budget", "trials", "errors", "error_rate", "wilson_low", "wilson_high", "mean_abs_err", "bound")
    data = {"outputs": [str(p) for p in outputs], "manifest": str(manifest), "summary": result.summary_dicts()}
    emit(args, format_table(header, rows), data)
    return EXIT_OK


def _bias_rows(args) -> List[list]:
    rows = []
    for n in args.n:
        lower, upper = emi_bias_bounds(args.card, args.card, n)
        rows.append([n, lower, upper, upper - lower, upper - lower >= math.log2(args.card)])
    return rows


def _concentration_rows(args) -> List[list]:
    rows = []
    for n in args.n:
        for epsilon in args.epsilon:
            bound = emi_concentration_bound(n, epsilon)
            rows.append([n, epsilon, bound.value, bound.raw, bound.vacuous])
    return rows


def _ordering_rows(args) -> List[list]:
    rows = []
    for n in args.n:
        lower, upper = emi_bias_bounds(args.card, args.card, n)
        bias = max(-lower, upper)
        try:
            bound = ordering_error_bound(n, args.gap, bias, bias)
        except PreconditionError as e:
            logger.debug(f"n={n}: {e}")
            rows.append([n, args.gap, bias, None, None, True])
            continue
        rows.append([n, args.gap, bias, bound.value, bound.raw, bound.vacuous])
    return rows


def _proposition_rows(args) -> List[list]:
    budgets = args.budget or [args.edges * n for n in args.n]
    rows = []
    for budget in budgets:
        result = error_probability_bound(args.gap, budget, args.card, args.edges)
        rows.append([budget, budget / args.edges, args.gap, result.bound.value, result.bound.raw,
                     result.bound.vacuous, result.valid, result.threshold])
    return rows


def _complexity_rows(args) -> List[list]:
    return [
        [epsilon, args.delta, args.gap, args.edges, args.card,
         sample_complexity(epsilon, args.delta, args.gap, args.edges, args.card)]
        for epsilon in args.epsilon
    ]


BOUND_TABLES = {
    "bias": (("n", "lower", "upper", "width", "vacuous"), _bias_rows),
    "concentration": (("n", "epsilon", "bound", "raw", "vacuous"), _concentration_rows),
    "ordering": (("n", "gap", "bias", "bound", "raw", "vacuous"), _ordering_rows),
    "proposition": (("budget", "per_edge", "gap", "bound", "raw", "vacuous", "valid", "threshold"),
                    _proposition_rows),
    "complexity": (("epsilon", "delta", "gap", "edges", "card", "budget"), _complexity_rows),
}


def cmd_bounds(args, config: MctsiConfig) -> int:
    if args.card < 1 or args.edges < 1:
        raise InvalidParameterError(f"card and edges must be >= 1, got {args.card}, {args.edges}")
    header, build = BOUND_TABLES[args.family]
    rows = build(args)
    if args.csv and not args.json:
        print(_csv_text(header, rows))
    else:
        emit(args, format_table(header, rows), [dict(zip(header, row)) for row in rows])
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "si": cmd_si,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "estimate": cmd_estimate,
    "bounds": cmd_bounds,
}
