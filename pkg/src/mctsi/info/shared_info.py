"""
Shared information.

SI(X_1..X_m) = min over partitions pi with k >= 2 atoms of
    I(pi) = [sum_u H(X_pi_u) - H(X_M)] / (k - 1),
evaluated by brute force over all partitions, and in closed form on an MCT as
the minimum edge mutual information. Also hosts the companion measures (total
and dual total correlation), their sandwich inequalities and the partition
repair procedure that turns disconnected atoms into connected ones without
raising I(pi).
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import (
    InternalConsistencyError,
    InvalidKeyError,
    InvalidParameterError,
    InvalidPartitionError,
    NoRepairNeeded,
    SizeLimitError,
)
from ..core.partition import DEFAULT_ENUMERATION_GUARD, Partition, restricted_growth_strings
from ..core.pmf import (
    PROB_TOL,
    JointPmf,
    SubsetEntropies,
    entropy_bits,
    group_variables,
    kl_divergence,
    marginalize,
)
from ..core.tree import Edge, Tree, agglomerate, branch_set, is_connected_set, maximally_connected_components
from ..models.mct import MctModel, edge_pair_pmf, vertex_marginals

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12
FORM_AGREEMENT_TOL = 1e-9
CROSS_CHECK_EVERY = 100  # divergence form re-evaluated on 1% of partitions
CHUNK_SIZE = 4096


@dataclass(frozen=True)
class PartitionScore:
    partition: Partition
    k: int
    score_bits: float


@dataclass(frozen=True)
class SiResult:
    """Shared information with its minimizer.

    Brute force fills ``argmin_partition``; the closed form fills ``argmin_edge``.
    """
    value_bits: float
    method: str
    argmin_partition: Optional[Partition] = None
    argmin_edge: Optional[Edge] = None
    evaluated: int = 0


def _check_vertex_pmf(p: JointPmf) -> None:
    if p.variables != tuple(range(1, p.m + 1)):
        raise InvalidKeyError(f"Expected a pmf over variables 1..{p.m}, got {p.variables}")


def _clamp_score(value: float, what: str) -> float:
    if value < -PROB_TOL:
        raise InternalConsistencyError(f"Negative {what} {value:.3e} bits")
    return max(value, 0.0)


def agglomerated_joint(p: JointPmf, part: Partition) -> JointPmf:
    """Joint law of the teamed variables X_pi_1..X_pi_k as super-variables 1..k."""
    _check_vertex_pmf(p)
    return group_variables(p, [sorted(atom) for atom in part.atoms])


def atom_product(p: JointPmf, part: Partition) -> JointPmf:
    """prod_u P_{X_pi_u}, laid out over the same variable order as ``p``."""
    product = JointPmf.product(marginalize(p, sorted(atom)) for atom in part.atoms)
    order = [product.variables.index(v) for v in p.variables]
    return JointPmf.from_tensor(p.variables, np.transpose(product.tensor, order), max_states=p.max_states)


def partition_score(p: JointPmf, part: Partition, table: Optional[SubsetEntropies] = None,
                    form: str = "entropy") -> PartitionScore:
    """I(pi) by the entropy form, or by the divergence form D(P || prod P_pi_u) / (k - 1)."""
    _check_vertex_pmf(p)
    if part.k < 2:
        raise InvalidPartitionError(f"Scoring needs at least two atoms, got {part}")
    if part.m != p.m:
        raise InvalidPartitionError(f"Partition of {part.m} vertices used with a pmf over {p.m}")
    if form == "entropy":
        table = table if table is not None else SubsetEntropies(p)
        value = (sum(table.h(atom) for atom in part.atoms) - table.h(p.variables)) / (part.k - 1)
    elif form == "divergence":
        value = kl_divergence(p, atom_product(p, part)) / (part.k - 1)
    else:
        raise ValueError(f"Unknown score form: {form}")
    return PartitionScore(part, part.k, _clamp_score(value, f"score of {part}"))


class _Argmin:
    """
    Running argmin with tolerance-aware, order-stable tie breaking.

    The winner is the earliest index whose score is within TIE_TOL of the global
    minimum. Only a staircase of strictly improving candidates is kept, which is
    enough to recover that winner and makes merging chunk results in stream
    order give the same answer as a single sequential pass.
    """

    def __init__(self):
        self.minimum = math.inf
        self.staircase: List[Tuple[int, float, tuple]] = []

    def add(self, index: int, score: float, payload: tuple) -> None:
        if self.staircase and score >= self.staircase[-1][1]:
            return
        self.staircase.append((index, score, payload))
        if score < self.minimum:
            self.minimum = score
            limit = score + TIE_TOL
            self.staircase = [c for c in self.staircase if c[1] <= limit]

    def merge(self, other: "_Argmin") -> None:
        for candidate in other.staircase:
            self.add(*candidate)

    @property
    def best(self) -> Tuple[int, float, tuple]:
        return self.staircase[0]


def _score_chunk(p: JointPmf, table: SubsetEntropies, bits: Sequence[int],
                 chunk: Sequence[Tuple[int, tuple]]) -> _Argmin:
    h_all = table.h_mask((1 << p.m) - 1)
    result = _Argmin()
    for index, rgs in chunk:
        k = max(rgs) + 1
        masks = [0] * k
        for position, block in enumerate(rgs):
            masks[block] |= bits[position]
        value = (sum(table.h_mask(mask) for mask in masks) - h_all) / (k - 1)
        if index % CROSS_CHECK_EVERY == 0:
            other = partition_score(p, Partition.from_rgs(rgs), form="divergence").score_bits
            if abs(other - max(value, 0.0)) > FORM_AGREEMENT_TOL:
                raise InternalConsistencyError(
                    f"Entropy and divergence forms disagree on {Partition.from_rgs(rgs)}: {value} vs {other}"
                )
        result.add(index, _clamp_score(value, "partition score"), rgs)
    return result


def _chunks(items: Iterator, size: int) -> Iterator[list]:
    while True:
        chunk = list(itertools.islice(items, size))
        if not chunk:
            return
        yield chunk


def si_brute_force(p: JointPmf, guard: int = DEFAULT_ENUMERATION_GUARD, threads: int = 1) -> SiResult:
    """
    Shared information by exhaustive search over all partitions with k >= 2.

    Ties within 1e-12 go to the partition whose restricted growth string comes
    first; the answer does not depend on ``threads``.
    """
    _check_vertex_pmf(p)
    m = p.m
    if m < 2:
        raise InvalidParameterError("Shared information needs at least two variables")
    if m > guard:
        raise SizeLimitError(f"Brute force over {m} variables exceeds the enumeration guard of {guard}")
    table = SubsetEntropies(p)
    bits = [table.mask([v]) for v in range(1, m + 1)]
    stream = ((index, rgs) for index, rgs in enumerate(
        rgs for rgs in restricted_growth_strings(m) if max(rgs) > 0
    ))
    best = _Argmin()
    evaluated = 0
    if threads <= 1:
        for chunk in _chunks(stream, CHUNK_SIZE):
            best.merge(_score_chunk(p, table, bits, chunk))
            evaluated += len(chunk)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pending = []
            for chunk in _chunks(stream, CHUNK_SIZE):
                pending.append((len(chunk), pool.submit(_score_chunk, p, table, bits, chunk)))
                if len(pending) >= 2 * threads:
                    size, future = pending.pop(0)
                    best.merge(future.result())
                    evaluated += size
            for size, future in pending:
                best.merge(future.result())
                evaluated += size
    _, value, rgs = best.best
    logger.debug(f"Scored {evaluated} partitions of {m} variables; minimum {value:.9f} bits")
    return SiResult(value, "brute", argmin_partition=Partition.from_rgs(rgs), evaluated=evaluated)


def _pair_mi(pair: np.ndarray) -> float:
    value = entropy_bits(pair.sum(axis=1)) + entropy_bits(pair.sum(axis=0)) - entropy_bits(pair)
    return _clamp_score(value, "edge mutual information")


def edge_mutual_informations(model: MctModel) -> Dict[Edge, float]:
    """Exact I(X_i ; X_j) for every edge, from the pushed-down pair marginals."""
    marginals = vertex_marginals(model)
    return {(i, j): _pair_mi(edge_pair_pmf(model, i, j, marginals)) for i, j in model.edges}


def si_mct(model: MctModel) -> SiResult:
    """Closed form on an MCT: the smallest edge mutual information, ties to the first edge."""
    if model.m < 2:
        raise InvalidParameterError("Shared information needs at least two variables")
    best_edge, best = None, math.inf
    for edge, value in sorted(edge_mutual_informations(model).items()):
        if value < best - TIE_TOL:
            best_edge, best = edge, value
    return SiResult(best, "exact", argmin_edge=best_edge, evaluated=len(model.edges))


def total_correlation(p: JointPmf) -> float:
    """C = sum_i H(X_i) - H(X_M)."""
    table = SubsetEntropies(p)
    value = sum(table.h([v]) for v in p.variables) - table.h(p.variables)
    return _clamp_score(value, "total correlation")


def total_correlation_chain(p: JointPmf) -> float:
    """C as the telescoping sum of I(X_{i+1} ; X_1..X_i)."""
    table = SubsetEntropies(p)
    v = p.variables
    return sum(table.mi(v[:i], [v[i]]) for i in range(1, p.m))


def dual_total_correlation_forms(p: JointPmf) -> Dict[str, float]:
    """Dual total correlation by three equivalent formulas."""
    table = SubsetEntropies(p)
    v, m = p.variables, p.m
    h_all = table.h(v)
    leave_one_out = [table.h(v[:i] + v[i + 1:]) for i in range(m)]
    return {
        "entropy": sum(leave_one_out) - (m - 1) * h_all,
        "residual": h_all - sum(h_all - rest for rest in leave_one_out),
        "conditional": sum(table.cmi([v[i]], v[i + 1:], v[:i]) for i in range(m)),
    }


def dual_total_correlation(p: JointPmf) -> float:
    """D = sum_i H(X_{M minus i}) - (m - 1) H(X_M)."""
    forms = dual_total_correlation_forms(p)
    if max(forms.values()) - min(forms.values()) > FORM_AGREEMENT_TOL:
        raise InternalConsistencyError(f"Dual total correlation forms disagree: {forms}")
    return _clamp_score(forms["entropy"], "dual total correlation")


@dataclass
class SandwichReport:
    si: float
    total_correlation: float
    dual_total_correlation: float
    m: int
    slack: float
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def sandwich_check(p: JointPmf, guard: int = DEFAULT_ENUMERATION_GUARD, slack: float = 1e-10,
                   threads: int = 1) -> SandwichReport:
    """C/(m-1) <= D <= (m-1) C, SI <= C/(m-1) and SI <= D."""
    si = si_brute_force(p, guard=guard, threads=threads).value_bits
    c, d, m = total_correlation(p), dual_total_correlation(p), p.m
    report = SandwichReport(si, c, d, m, slack)
    report.checks = {
        "C/(m-1) <= D": c / (m - 1) <= d + slack,
        "D <= (m-1)C": d <= (m - 1) * c + slack,
        "SI <= C/(m-1)": si <= c / (m - 1) + slack,
        "SI <= D": si <= d + slack,
    }
    if not report.passed:
        logger.warning(f"Sandwich violated: {report.checks} (SI={si}, C={c}, D={d})")
    return report


@dataclass(frozen=True)
class RepairStep:
    """One repair move: the chosen partition and the candidates it was picked from."""
    before: PartitionScore
    after: PartitionScore
    candidates: Tuple[PartitionScore, ...]
    atom: frozenset
    pivot: int


def _first_disconnected(part: Partition, tree: Tree) -> Optional[int]:
    for index, atom in enumerate(part.atoms):
        if not is_connected_set(tree, atom):
            return index
    return None


def _pivot(tree: Tree, atom: frozenset) -> Tuple[frozenset, int, int]:
    """
    Pick a component A of ``atom`` and an outside neighbour j of A whose subtree
    holds the rest of the atom. Components are tried by smallest vertex, then j
    by id. Returns (A, a, j) with (a, j) the boundary edge used.
    """
    components = maximally_connected_components(tree, atom)
    for component in components:
        rest = atom - component
        boundary = sorted((j, a) for a in component for j in tree.neighbors(a) if j not in atom)
        for j, a in boundary:
            if rest <= branch_set(tree, j, a):
                return component, a, j
    raise InternalConsistencyError(f"No separating pivot for atom {sorted(atom)}")


def partition_repair_step(p: JointPmf, part: Partition, tree: Tree,
                          table: Optional[SubsetEntropies] = None) -> RepairStep:
    """
    Replace a disconnected atom pi_1 by either merging it with the atom pi_u
    holding the pivot j, or splitting off its component A; keep the lower score.

    For k = 2 the merge would leave a single atom, so the second candidate is
    the connected 2-partition across the first edge joining the two atoms.
    Raises NoRepairNeeded when every atom is already connected.
    """
    index = _first_disconnected(part, tree)
    if index is None:
        raise NoRepairNeeded(f"Every atom of {part} is connected")
    table = table if table is not None else SubsetEntropies(p)
    before = partition_score(p, part, table)
    atom = part.atoms[index]
    component, _, j = _pivot(tree, atom)
    u = part.atom_of(j)
    split = part.replace([index, u], [atom - component, component, part.atoms[u]])
    candidates = [partition_score(p, split, table)]
    if part.k > 2:
        merged = part.replace([index, u], [atom | part.atoms[u]])
        candidates.insert(0, partition_score(p, merged, table))
    else:
        i0, j0 = min(e for e in tree.edges if (e[0] in atom) != (e[1] in atom))
        cut = Partition.of(branch_set(tree, i0, j0), branch_set(tree, j0, i0))
        candidates.insert(0, partition_score(p, cut, table))
    after = min(candidates, key=lambda c: c.score_bits)
    logger.debug(f"Repair {part} -> {after.partition}: {before.score_bits:.9f} -> {after.score_bits:.9f}")
    return RepairStep(before, after, tuple(candidates), component, j)


@dataclass(frozen=True)
class RepairResult:
    partition: Partition
    score_bits: float
    steps: Tuple[RepairStep, ...]


def repair_partition(p: JointPmf, part: Partition, tree: Tree) -> RepairResult:
    """Apply repair steps until all atoms are connected."""
    table = SubsetEntropies(p)
    steps: List[RepairStep] = []
    # each step lowers (component excess, k) lexicographically, so m * m steps is ample
    for _ in range(tree.m * tree.m + 1):
        try:
            step = partition_repair_step(p, part, tree, table)
        except NoRepairNeeded:
            return RepairResult(part, partition_score(p, part, table).score_bits, tuple(steps))
        steps.append(step)
        part = step.after.partition
    raise InternalConsistencyError(f"Partition repair did not terminate for {part}")


@dataclass(frozen=True)
class IdentityCheck:
    score_bits: float
    edge_average_bits: float

    @property
    def difference(self) -> float:
        return abs(self.score_bits - self.edge_average_bits)


def step_one_identity(p: JointPmf, part: Partition, tree: Tree) -> IdentityCheck:
    """
    For a partition into connected atoms of an MCT, I(pi) equals the mean mutual
    information across the edges of the agglomerated tree.
    """
    quotient, _ = agglomerate(tree, part)
    teamed = agglomerated_joint(p, part)
    table = SubsetEntropies(teamed)
    average = sum(table.mi([u], [v]) for u, v in quotient.edges) / len(quotient.edges)
    return IdentityCheck(partition_score(p, part).score_bits, average)

