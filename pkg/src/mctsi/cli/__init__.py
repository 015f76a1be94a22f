"""
Command-line front end: ``mctsi <command> [options]``.

Exit codes: 0 ok, 1 verification failed, 2 parse error, 3 invariant violation,
4 precondition or size guard, 5 I/O error.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from .. import __version__
from ..config import MctsiConfig
from ..core.errors import (
    InternalConsistencyError,
    InvalidEdgeError,
    InvalidKeyError,
    InvalidPartitionError,
    InvalidTreeError,
    MctsiError,
    ModelParseError,
    ModelValidationError,
)
from ..tools import SUITE_NAMES
from .commands import (
    BOUND_FAMILIES,
    COMMANDS,
    EXIT_INVARIANT,
    EXIT_IO,
    EXIT_PARSE,
    EXIT_PRECONDITION,
)

logger = logging.getLogger(__name__)

DEFAULT_N_SWEEP = [10 ** k for k in range(2, 7)]


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print machine-readable JSON on stdout")
    common.add_argument("--seed", type=int, default=None, help="Master seed (default 0)")
    common.add_argument("--threads", type=int, default=None, help="Worker threads (env MCTSI_THREADS)")
    common.add_argument("--tol", type=float, default=None, help="Verification tolerance in bits (env MCTSI_TOL)")
    common.add_argument("--guard", type=int, default=None,
                        help="Largest m for brute-force partition search (env MCTSI_ENUM_GUARD)")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (env MCTSI_LOG_LEVEL)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="mctsi", description="Shared information of Markov chains on trees.")
    parser.add_argument("--version", action="version", version=f"mctsi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="Check a model file against every model invariant")
    p.add_argument("model", help="Model file or builtin:<name>")

    p = sub.add_parser("si", parents=[common], help="Shared information of a model")
    p.add_argument("model")
    p.add_argument("--method", choices=("exact", "brute", "both"), default="exact")

    p = sub.add_parser("verify", parents=[common], help="Run Markov-property and sandwich suites")
    p.add_argument("model")
    p.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive",
                   help="Separated-triple scan of the global suite")
    p.add_argument("--count", type=int, default=1000, help="Triples drawn in sampled mode")

    p = sub.add_parser("sample", parents=[common], help="Draw i.i.d. samples to a CSV file")
    p.add_argument("model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True, help="Output directory")

    p = sub.add_parser("estimate", parents=[common], help="Run a bandit experiment file")
    p.add_argument("experiment")
    p.add_argument("--out", required=True, help="Output directory")

    p = sub.add_parser("bounds", parents=[common], help="Tabulate a closed-form bound")
    p.add_argument("--family", choices=BOUND_FAMILIES, required=True)
    p.add_argument("--card", type=int, default=2, help="Alphabet size")
    p.add_argument("--n", type=int, nargs="+", default=DEFAULT_N_SWEEP, help="Samples per pair")
    p.add_argument("--epsilon", type=float, nargs="+", default=[0.05])
    p.add_argument("--gap", type=float, default=0.3, help="Information gap (delta, or delta_1)")
    p.add_argument("--delta", type=float, default=0.05, help="Failure probability for complexity")
    p.add_argument("--edges", type=int, default=2, help="Tree edge count")
    p.add_argument("--budget", type=int, nargs="+", default=None, help="Total budgets (proposition)")
    p.add_argument("--csv", action="store_true", help="Print CSV instead of a table")
    return parser


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, ModelParseError):
        return EXIT_PARSE
    if isinstance(error, (ModelValidationError, InvalidTreeError, InvalidEdgeError, InvalidKeyError,
                          InvalidPartitionError, InternalConsistencyError)):
        return EXIT_INVARIANT
    if isinstance(error, MctsiError):
        return EXIT_PRECONDITION
    if isinstance(error, OSError):
        return EXIT_IO
    raise error


def resolve_config(args) -> MctsiConfig:
    return MctsiConfig.from_env(
        threads=args.threads,
        tol=args.tol,
        enumeration_guard=args.guard,
        log_level=args.log_level,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = resolve_config(args)
    logging.basicConfig(
        level=getattr(logging, str(config.log_level).upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args, config)
    except (MctsiError, OSError) as e:
        code = exit_code_for(e)
        logger.error(f"{args.command}: {e}")
        if args.json:
            print(json.dumps({"error": str(e), "path": getattr(e, "path", None), "exit_code": code},
                             indent=2, sort_keys=True))
        else:
            print(f"error: {e}", file=sys.stderr)
        return code
