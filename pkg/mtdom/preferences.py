"""Preference systems [A, R1, R2] and their linear utility-representation constraints."""

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Hashable, Iterable, Optional

import networkx as nx
import numpy as np
from numpy.typing import NDArray

from .config import SolverConfig, resolve_config
from .exceptions import DeltaRangeError, InconsistentPreferenceError, RelationError
from .lp import LpProblem, LpStatus, solve

logger = logging.getLogger(__name__)

Pair = tuple[int, int]
PairOfPairs = tuple[Pair, Pair]


@dataclass(frozen=True)
class RelationParts:
    """Strict part P_R and indifference part I_R of a preorder R."""

    strict: frozenset
    indiff: frozenset


def _relation_matrix(
    rel: Iterable[tuple[Hashable, Hashable]], nodes: Optional[list] = None
) -> tuple[list, dict, NDArray[np.bool_]]:
    rel = list(rel)
    if nodes is None:
        nodes = sorted({x for pair in rel for x in pair})
    index = {node: i for i, node in enumerate(nodes)}
    matrix = np.zeros((len(nodes), len(nodes)), dtype=bool)
    if rel:
        rows = [index[a] for a, _ in rel]
        cols = [index[b] for _, b in rel]
        matrix[rows, cols] = True
    return nodes, index, matrix


def is_transitive_matrix(matrix: NDArray[np.bool_]) -> bool:
    """Whether a boolean relation matrix is transitive."""
    as_float = matrix.astype(np.float32)
    composed = (as_float @ as_float) > 0
    return not np.any(composed & ~matrix)


def check_preorder(
    rel: Iterable[tuple[Hashable, Hashable]],
    name: str = "relation",
    implicit_reflexive: bool = False,
) -> None:
    """Raise RelationError unless rel is reflexive (on its field) and transitive."""
    _, _, matrix = _relation_matrix(rel)
    if implicit_reflexive:
        np.fill_diagonal(matrix, True)
    elif not np.all(np.diag(matrix)):
        raise RelationError(f"{name} is not reflexive")
    if not is_transitive_matrix(matrix):
        raise RelationError(f"{name} is not transitive")


def relation_parts(
    rel: Iterable[tuple[Hashable, Hashable]],
    check: bool = True,
    implicit_reflexive: bool = False,
) -> RelationParts:
    """Split a preorder into its strict and indifference parts."""
    rel = frozenset(rel)
    if check:
        check_preorder(rel, implicit_reflexive=implicit_reflexive)
    strict = frozenset((a, b) for a, b in rel if (b, a) not in rel)
    return RelationParts(strict=strict, indiff=rel - strict)


def transitive_closure(
    rel: Iterable[tuple[Hashable, Hashable]],
    elements: Iterable[Hashable] = (),
    reflexive: bool = True,
) -> frozenset:
    """Reflexive-transitive closure of rel over elements plus rel's field."""
    graph = nx.DiGraph()
    graph.add_nodes_from(elements)
    graph.add_edges_from(rel)
    closure = nx.transitive_closure(graph, reflexive=reflexive)
    return frozenset(closure.edges())


@dataclass(frozen=True, eq=False)
class NablaRows:
    """The delta-independent part of the constraint set.

    Equalities read ``eq_matrix @ v == eq_rhs``; every strict row reads
    ``strict_matrix @ v >= delta``.
    """

    eq_matrix: NDArray[np.float64]
    eq_rhs: NDArray[np.float64]
    strict_matrix: NDArray[np.float64]


@dataclass(frozen=True)
class DeltaBound:
    """Largest delta for which a preference system is still consistent."""

    value: float
    at_boundary: bool
    admissible: float


@dataclass(frozen=True)
class PreferenceSystem:
    """A preference system [A, R1, R2] over indexed consequences.

    r1 holds index pairs (i, j) meaning a_i is at least as good as a_j. r2
    holds pairs of r1 members ((k, l), (p, q)) meaning the exchange of a_l
    for a_k is at least as desirable as that of a_q for a_p. Reflexive r2
    pairs are implicit. When r2_closed is False, r2 is only a generating set
    (see prune_r2) and is not required to be transitive.
    """

    elements: tuple
    r1: frozenset
    r2: frozenset = frozenset()
    top_index: Optional[int] = None
    bottom_index: Optional[int] = None
    r2_closed: bool = field(default=True)

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise RelationError("a preference system needs at least one element")
        for i, j in self.r1:
            if not (0 <= i < n and 0 <= j < n):
                raise RelationError(f"R1 pair ({i}, {j}) references an unknown element")
        _, _, matrix = _relation_matrix(self.r1, nodes=list(range(n)))
        if not np.all(np.diag(matrix)):
            missing = int(np.argmin(np.diag(matrix)))
            raise RelationError(f"R1 is not reflexive (missing ({missing}, {missing}))")
        if not is_transitive_matrix(matrix):
            raise RelationError("R1 is not transitive")

        for first, second in self.r2:
            if first not in self.r1 or second not in self.r1:
                raise RelationError(
                    f"R2 pair ({first}, {second}) compares pairs outside R1"
                )
        if self.r2_closed and self.r2:
            check_preorder(self.r2, name="R2", implicit_reflexive=True)

        for name, index in (("top", self.top_index), ("bottom", self.bottom_index)):
            if index is not None and not 0 <= index < n:
                raise RelationError(f"{name} index {index} is out of range")
        if self.top_index is not None and not np.all(matrix[self.top_index]):
            raise RelationError("top element is not R1-above every element")
        if self.bottom_index is not None and not np.all(matrix[:, self.bottom_index]):
            raise RelationError("bottom element is not R1-below every element")

    @classmethod
    def create(
        cls,
        elements: Iterable[Hashable],
        r1: Iterable[Pair],
        r2: Iterable[PairOfPairs] = (),
        top: Optional[int] = None,
        bottom: Optional[int] = None,
        close: bool = False,
    ) -> "PreferenceSystem":
        """Build a system, optionally completing r1 and r2 transitively first."""
        elements = tuple(elements)
        r1 = frozenset((int(i), int(j)) for i, j in r1)
        r2 = frozenset(
            ((int(k), int(l)), (int(p), int(q))) for (k, l), (p, q) in r2
        )
        if close:
            r1 = transitive_closure(r1, range(len(elements)))
            r2 = transitive_closure(r2, reflexive=False)
        return cls(elements, r1, r2, top, bottom)

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def r1_parts(self) -> RelationParts:
        return relation_parts(self.r1, check=False)

    @cached_property
    def r2_parts(self) -> RelationParts:
        return relation_parts(self.r2, check=False)

    @cached_property
    def nabla_rows(self) -> NablaRows:
        """Deduplicated coefficient rows of every R1/R2 constraint."""
        self._require_extremes()
        n = self.size
        eq_rows = [np.eye(n)[self.top_index], np.eye(n)[self.bottom_index]]
        eq_rhs = [1.0, 0.0]

        r1_indiff = [(i, j) for i, j in self.r1_parts.indiff if i < j]
        r2_indiff = [pp for pp in self.r2_parts.indiff if pp[0] < pp[1]]
        indiff_rows = np.vstack(
            [_difference_rows(r1_indiff, n), _pair_difference_rows(r2_indiff, n)]
        )
        indiff_rows = indiff_rows[np.any(indiff_rows != 0, axis=1)]
        if indiff_rows.shape[0]:
            # a row and its negation state the same equality
            leading = indiff_rows[np.arange(len(indiff_rows)), np.argmax(indiff_rows != 0, axis=1)]
            indiff_rows = np.unique(indiff_rows * np.sign(leading)[:, None], axis=0)
        eq_matrix = np.vstack([np.vstack(eq_rows), indiff_rows])
        eq_rhs = np.concatenate([eq_rhs, np.zeros(indiff_rows.shape[0])])

        strict_rows = np.vstack(
            [
                _difference_rows(sorted(self.r1_parts.strict), n),
                _pair_difference_rows(sorted(self.r2_parts.strict), n),
            ]
        )
        if strict_rows.shape[0]:
            strict_rows = np.unique(strict_rows, axis=0)
        logger.debug(
            "constraint rows for %d elements: %d equalities, %d strict",
            n,
            eq_matrix.shape[0],
            strict_rows.shape[0],
        )
        return NablaRows(eq_matrix, eq_rhs, strict_rows)

    def _require_extremes(self) -> None:
        if self.top_index is None or self.bottom_index is None:
            raise RelationError(
                "the constraint set needs both a top and a bottom element"
            )


def _difference_rows(pairs: list[Pair], n: int) -> NDArray[np.float64]:
    rows = np.zeros((len(pairs), n))
    if pairs:
        idx = np.arange(len(pairs))
        first, second = np.asarray(pairs).T
        np.add.at(rows, (idx, first), 1.0)
        np.add.at(rows, (idx, second), -1.0)
    return rows


def _pair_difference_rows(pairs: list[PairOfPairs], n: int) -> NDArray[np.float64]:
    rows = np.zeros((len(pairs), n))
    if pairs:
        idx = np.arange(len(pairs))
        flat = np.asarray([(k, l, p, q) for (k, l), (p, q) in pairs])
        for column, sign in zip(flat.T, (1.0, -1.0, -1.0, 1.0)):
            np.add.at(rows, (idx, column), sign)
    return rows


def check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 <= delta < 1.0:
        raise DeltaRangeError(f"delta must lie in [0, 1), got {delta}")
    return delta


def nabla_constraints(ps: PreferenceSystem, delta: float) -> LpProblem:
    """The feasible set of normalised representations with margin delta, as an LP over v."""
    delta = check_delta(delta)
    rows = ps.nabla_rows
    n = ps.size
    return LpProblem.from_arrays(
        np.zeros(n),
        rows.eq_matrix,
        rows.eq_rhs,
        rows.strict_matrix,
        np.full(rows.strict_matrix.shape[0], delta),
        np.tile([0.0, 1.0], (n, 1)),
    )


def is_delta_consistent(
    ps: PreferenceSystem, delta: float, config: Optional[SolverConfig] = None
) -> bool:
    """Whether a normalised representation with margin delta exists."""
    outcome = solve(nabla_constraints(ps, delta), config)
    return outcome.status is LpStatus.OPTIMAL


def max_delta(ps: PreferenceSystem, config: Optional[SolverConfig] = None) -> DeltaBound:
    """Largest delta with a feasible constraint set, from one LP in (v, delta)."""
    config = resolve_config(config)
    rows = ps.nabla_rows
    n = ps.size
    objective = np.zeros(n + 1)
    objective[n] = -1.0
    eq_matrix = np.hstack([rows.eq_matrix, np.zeros((rows.eq_matrix.shape[0], 1))])
    strict_matrix = np.hstack(
        [rows.strict_matrix, -np.ones((rows.strict_matrix.shape[0], 1))]
    )
    problem = LpProblem.from_arrays(
        objective,
        eq_matrix,
        rows.eq_rhs,
        strict_matrix,
        np.zeros(strict_matrix.shape[0]),
        np.tile([0.0, 1.0], (n + 1, 1)),
    )
    outcome = solve(problem, config)
    if outcome.status is not LpStatus.OPTIMAL:
        raise InconsistentPreferenceError(
            "preference system is not 0-consistent: no normalised representation exists"
        )
    value = min(max(-outcome.optimal_value, 0.0), 1.0)
    at_boundary = value >= 1.0 - config.feasibility_tolerance
    if at_boundary:
        value = 1.0
    admissible = 1.0 - config.optimality_tolerance if at_boundary else value
    logger.info("delta_max = %.12g%s", value, " (boundary)" if at_boundary else "")
    return DeltaBound(value=value, at_boundary=at_boundary, admissible=admissible)


def satisfies_nabla(ps: PreferenceSystem, v, delta: float) -> float:
    """Smallest slack of v over every constraint (negative when violated)."""
    v = np.asarray(v, dtype=float)
    rows = ps.nabla_rows
    slacks = [np.min(v), np.min(1.0 - v)]
    if rows.eq_matrix.shape[0]:
        slacks.append(-np.max(np.abs(rows.eq_matrix @ v - rows.eq_rhs)))
    if rows.strict_matrix.shape[0]:
        slacks.append(np.min(rows.strict_matrix @ v - delta))
    return float(min(slacks))


def prune_r2(ps: PreferenceSystem) -> PreferenceSystem:
    """Drop R2 pairs implied by transitivity; the constraint set stays the same.

    Each indifference class of R2 keeps one star of pairs through its first
    member, and strict pairs are cut down to the transitive reduction
    between classes.
    """
    if not ps.r2:
        return ps
    graph = nx.DiGraph()
    graph.add_edges_from(ps.r2)
    graph.remove_edges_from(nx.selfloop_edges(graph))
    condensed = nx.condensation(graph)
    representative = {
        node: min(data["members"]) for node, data in condensed.nodes(data=True)
    }
    kept = set()
    for node, data in condensed.nodes(data=True):
        rep = representative[node]
        for member in data["members"]:
            if member != rep:
                kept.add((rep, member))
                kept.add((member, rep))
    for a, b in nx.transitive_reduction(condensed).edges():
        kept.add((representative[a], representative[b]))
    logger.debug("pruned R2 from %d to %d pairs", len(ps.r2), len(kept))
    return replace(ps, r2=frozenset(kept), r2_closed=False)


def inconsistency_error(
    ps: PreferenceSystem, delta: float, config: Optional[SolverConfig] = None
) -> InconsistentPreferenceError:
    """The error for a delta above delta_max, carrying the computed delta_max."""
    bound = max_delta(ps, config)
    return InconsistentPreferenceError(
        f"delta = {delta:.12g} exceeds delta_max = {bound.value:.12g}: "
        "the preference system is not consistent at this granularity",
        delta_max=bound.value,
    )
