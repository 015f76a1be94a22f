"""
Concrete verification suites wrapping the Markov checks and the sandwich check.
"""

import logging

from ..config import DEFAULT_CONFIG, MctsiConfig
from ..info.shared_info import sandwich_check
from ..models.loader import ModelTarget
from .markov import MarkovReport, lemma1_identity_check, verify_edge_markov, verify_global_markov, verify_local_markov
from .suite import Suite, SuiteResult

logger = logging.getLogger(__name__)


def _from_report(report: MarkovReport, **details) -> SuiteResult:
    details.update({
        "tested": report.tested,
        "skipped": report.skipped,
        "violations": report.violation_count,
        "worst_triple": str(report.worst) if report.worst is not None else None,
        "listed_violations": [str(v) for v in report.violations],
    })
    return SuiteResult(report.name, report.passed, report.worst_value, report.summary(), details)


class EdgeSuite(Suite):
    def __init__(self):
        super().__init__("edge", "Per-edge conditional independence of each branch given the near endpoint")

    def run(self, target: ModelTarget, config: MctsiConfig = DEFAULT_CONFIG, **options) -> SuiteResult:
        return _from_report(verify_edge_markov(target.joint(config.dense_state_guard), target.tree, config.tol))


class LocalSuite(Suite):
    def __init__(self):
        super().__init__("local", "Independent sets are independent of the rest given their neighborhood")

    def run(self, target: ModelTarget, config: MctsiConfig = DEFAULT_CONFIG, **options) -> SuiteResult:
        report = verify_local_markov(
            target.joint(config.dense_state_guard), target.tree, config.tol, set_cap=config.local_set_cap
        )
        return _from_report(report, set_cap=config.local_set_cap)


class GlobalSuite(Suite):
    def __init__(self):
        super().__init__("global", "Separated vertex sets are conditionally independent given the separator")

    def run(self, target: ModelTarget, config: MctsiConfig = DEFAULT_CONFIG, **options) -> SuiteResult:
        mode = options.get("mode") or "exhaustive"
        report = verify_global_markov(
            target.joint(config.dense_state_guard), target.tree, config.tol,
            mode=mode, count=options.get("count", 1000), seed=options.get("seed", 0),
            guard=config.exhaustive_guard,
        )
        return _from_report(report, mode=mode)


class Lemma1Suite(Suite):
    def __init__(self):
        super().__init__("lemma1", "Branch-to-branch information equals endpoint information on every edge")

    def run(self, target: ModelTarget, config: MctsiConfig = DEFAULT_CONFIG, **options) -> SuiteResult:
        return _from_report(lemma1_identity_check(target.joint(config.dense_state_guard), target.tree, config.tol))


class SandwichSuite(Suite):
    def __init__(self):
        super().__init__("sandwich", "Shared information sits below both normalized correlation measures")

    def run(self, target: ModelTarget, config: MctsiConfig = DEFAULT_CONFIG, **options) -> SuiteResult:
        p = target.joint(config.dense_state_guard)
        report = sandwich_check(p, guard=config.enumeration_guard, threads=config.threads)
        worst = max(
            report.total_correlation / (report.m - 1) - report.dual_total_correlation,
            report.dual_total_correlation - (report.m - 1) * report.total_correlation,
            report.si - report.total_correlation / (report.m - 1),
            report.si - report.dual_total_correlation,
        )
        status = "PASS" if report.passed else "FAIL"
        summary = (f"sandwich: {status} (SI={report.si:.7f}, C={report.total_correlation:.7f}, "
                   f"D={report.dual_total_correlation:.7f})")
        details = {
            "si": report.si,
            "total_correlation": report.total_correlation,
            "dual_total_correlation": report.dual_total_correlation,
            "checks": report.checks,
        }
        return SuiteResult("sandwich", report.passed, worst, summary, details)
