"""
Numerical checks of the Markov properties of a joint pmf placed on a tree.

Every check reduces to conditional mutual informations read from one
subset-entropy table, so a report costs a single pass over the dense joint.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple, Union

import networkx as nx

from ..core.errors import InvalidKeyError, SizeLimitError
from ..core.pmf import JointPmf, SubsetEntropies
from ..core.rng import SeedLike, as_rng
from ..core.tree import Tree, branch_set, neighborhood
from ..models.mct import MctModel, joint_pmf

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_EXHAUSTIVE_GUARD = 10
DEFAULT_LOCAL_SET_CAP = 3
MAX_LISTED_VIOLATIONS = 100

VertexTuple = Tuple[int, ...]


@dataclass(frozen=True)
class MarkovCheck:
    """One tested statistic, normally I(X_A ; X_B | X_S) in bits."""
    a: VertexTuple
    b: VertexTuple
    s: VertexTuple
    value: float
    passed: bool

    def __str__(self):
        def fmt(vs):
            return "{" + ",".join(map(str, vs)) + "}"
        return f"I({fmt(self.a)} ; {fmt(self.b)} | {fmt(self.s)}) = {self.value:.7f}"


@dataclass
class MarkovReport:
    """Outcome of one property check: counts, worst statistic and the first violations."""
    name: str
    tol: float
    tested: int = 0
    skipped: int = 0
    violation_count: int = 0
    worst: Optional[MarkovCheck] = None
    violations: List[MarkovCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    @property
    def worst_value(self) -> float:
        return self.worst.value if self.worst is not None else 0.0

    def record(self, a, b, s, value: float) -> MarkovCheck:
        check = MarkovCheck(tuple(sorted(a)), tuple(sorted(b)), tuple(sorted(s)), value, value <= self.tol)
        self.tested += 1
        if self.worst is None or value > self.worst.value:
            self.worst = check
        if not check.passed:
            self.violation_count += 1
            if len(self.violations) < MAX_LISTED_VIOLATIONS:
                self.violations.append(check)
        return check

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = f"; worst {self.worst}" if self.worst is not None else ""
        return f"{self.name}: {status} ({self.tested} tested, {self.violation_count} violations{worst})"


def _resolve(target: Union[MctModel, JointPmf], tree: Optional[Tree]) -> Tuple[JointPmf, Tree]:
    if isinstance(target, MctModel):
        return joint_pmf(target), target.tree
    if tree is None:
        raise ValueError("A tree is required when checking a bare pmf")
    if target.variables != tuple(range(1, tree.m + 1)):
        raise InvalidKeyError(f"Pmf over {target.variables} does not match a {tree.m}-vertex tree")
    return target, tree


def verify_edge_markov(target: Union[MctModel, JointPmf], tree: Optional[Tree] = None,
                       tol: float = DEFAULT_TOL) -> MarkovReport:
    """For every edge (i, j), in both orientations: I(X_j ; X_{B(i<-j) minus i} | X_i) <= tol."""
    p, tree = _resolve(target, tree)
    table = SubsetEntropies(p)
    report = MarkovReport("edge", tol)
    for i, j in tree.edges:
        for near, far in ((i, j), (j, i)):
            beyond = branch_set(tree, near, far) - {near}
            if not beyond:
                report.skipped += 1
                continue
            report.record((far,), beyond, (near,), table.cmi([far], beyond, [near]))
    logger.debug(report.summary())
    return report


def independent_sets(tree: Tree, cap: int) -> Iterator[frozenset]:
    """Nonempty independent vertex sets of size at most ``cap``."""
    for size in range(1, cap + 1):
        for members in itertools.combinations(range(1, tree.m + 1), size):
            if not any(tree.has_edge(u, v) for u, v in itertools.combinations(members, 2)):
                yield frozenset(members)


def verify_local_markov(target: Union[MctModel, JointPmf], tree: Optional[Tree] = None,
                        tol: float = DEFAULT_TOL, set_cap: int = DEFAULT_LOCAL_SET_CAP) -> MarkovReport:
    """X_A independent of the rest given X_N(A), for every independent set A up to ``set_cap`` vertices."""
    p, tree = _resolve(target, tree)
    table = SubsetEntropies(p)
    report = MarkovReport("local", tol)
    for a in independent_sets(tree, set_cap):
        around = neighborhood(tree, a)
        rest = tree.vertices - a - around
        if not rest:
            report.skipped += 1
            continue
        report.record(a, rest, around, table.cmi(a, rest, around))
    logger.debug(report.summary())
    return report


def _component_labels(tree: Tree, s_vertices: List[int]) -> dict:
    rest = nx.restricted_view(tree.graph, s_vertices, [])
    labels = {}
    for label, component in enumerate(nx.connected_components(rest)):
        for v in component:
            labels[v] = label
    return labels


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _members(mask: int) -> List[int]:
    return [v + 1 for v in range(mask.bit_length()) if mask >> v & 1]


def verify_global_markov(target: Union[MctModel, JointPmf], tree: Optional[Tree] = None,
                         tol: float = DEFAULT_TOL, mode: str = "exhaustive", count: int = 1000,
                         seed: SeedLike = 0, guard: int = DEFAULT_EXHAUSTIVE_GUARD) -> MarkovReport:
    """
    I(X_A ; X_B | X_S) <= tol for triples where S separates A from B.

    ``exhaustive`` visits every separated triple once (A and B unordered, the
    lowest vertex of A u B placed in A); ``sampled`` assigns each vertex to one
    of A, B, S or none at random and keeps the first ``count`` separated draws.
    """
    p, tree = _resolve(target, tree)
    if mode == "exhaustive" and tree.m > guard:
        raise SizeLimitError(f"Exhaustive global scan over {tree.m} vertices exceeds the guard of {guard}")
    table = SubsetEntropies(p)
    report = MarkovReport("global", tol)
    # vertex v <-> bit v-1, matching the table since variables are 1..m
    if mode == "exhaustive":
        _scan_exhaustive(tree, table, report)
    elif mode == "sampled":
        _scan_sampled(tree, table, report, count, as_rng(seed))
    else:
        raise ValueError(f"Unknown global-Markov mode: {mode}")
    logger.debug(report.summary())
    return report


def _scan_exhaustive(tree: Tree, table: SubsetEntropies, report: MarkovReport) -> None:
    full = (1 << tree.m) - 1
    for s_mask in range(1, full):
        labels = _component_labels(tree, _members(s_mask))
        comp_bit = {v: 1 << labels[v] for v in labels}
        if len(set(labels.values())) < 2:
            continue
        rest = full & ~s_mask
        for a_mask in _submasks(rest):
            lowest = a_mask & -a_mask
            a_comps = 0
            for v in _members(a_mask):
                a_comps |= comp_bit[v]
            # B lives in the components A does not touch, above A's lowest vertex
            allowed = 0
            for v in _members(rest & ~a_mask):
                if not comp_bit[v] & a_comps and (1 << (v - 1)) > lowest:
                    allowed |= 1 << (v - 1)
            for b_mask in _submasks(allowed):
                value = table.cmi_masks(a_mask, b_mask, s_mask)
                report.record(_members(a_mask), _members(b_mask), _members(s_mask), value)


def _scan_sampled(tree: Tree, table: SubsetEntropies, report: MarkovReport, count: int, rng) -> None:
    attempts, limit = 0, max(100 * count, 1000)
    while report.tested < count and attempts < limit:
        attempts += 1
        roles = rng.integers(0, 4, size=tree.m)
        a = [v for v in range(1, tree.m + 1) if roles[v - 1] == 0]
        b = [v for v in range(1, tree.m + 1) if roles[v - 1] == 1]
        s = [v for v in range(1, tree.m + 1) if roles[v - 1] == 2]
        if not a or not b or not s:
            continue
        labels = _component_labels(tree, s)
        if {labels[v] for v in a} & {labels[v] for v in b}:
            report.skipped += 1
            continue
        report.record(a, b, s, table.cmi(a, b, s))
    if report.tested < count:
        logger.warning(f"Sampled only {report.tested} separated triples in {attempts} draws")


def lemma1_identity_check(target: Union[MctModel, JointPmf], tree: Optional[Tree] = None,
                          tol: float = DEFAULT_TOL) -> MarkovReport:
    """Per edge, |I(X_B(i<-j) ; X_B(j<-i)) - I(X_i ; X_j)| <= tol; the statistic is that gap."""
    p, tree = _resolve(target, tree)
    table = SubsetEntropies(p)
    report = MarkovReport("lemma1", tol)
    for i, j in tree.edges:
        left, right = branch_set(tree, i, j), branch_set(tree, j, i)
        gap = abs(table.mi(left, right) - table.mi([i], [j]))
        report.record(left, right, (), gap)
    logger.debug(report.summary())
    return report
