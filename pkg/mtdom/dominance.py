"""Dominance between acts under a preference system, a credal set and a granularity delta.

X dominates Y when E_pi(u o X) >= E_pi(u o Y) for every normalised
representation u with margin delta and every pi in the credal set. Since
the expectation gap is linear in u and in pi, it is enough to minimise it
over the constraint set once per extreme point of the credal set.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import networkx as nx
import numpy as np
from numpy.typing import NDArray

from .config import SolverConfig, resolve_config
from .credal import CredalSet
from .exceptions import InputError, SolverError
from .lp import LpProblem, LpStatus, SolverBackend, solve
from .preferences import (
    PreferenceSystem,
    inconsistency_error,
    is_delta_consistent,
    is_transitive_matrix,
    nabla_constraints,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Act:
    """A named act; outcome_index[s] is the element index of its consequence in state s."""

    name: str
    outcome_index: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "outcome_index", tuple(int(i) for i in self.outcome_index)
        )


@dataclass(frozen=True, eq=False)
class PairVerdict:
    """Outcome of one dominance check.

    witness and extreme_index locate the minimising representation and
    extreme point; when holds is False they form an exact counterexample.
    """

    holds: bool
    min_opt: float
    witness: Optional[NDArray[np.float64]] = field(default=None, repr=False)
    extreme_index: int = 0
    marginal: bool = False
    extreme_values: Optional[NDArray[np.float64]] = field(default=None, repr=False)


def _outcome_incidence(act: Act, num_elements: int) -> NDArray[np.float64]:
    incidence = np.zeros((len(act.outcome_index), num_elements))
    incidence[np.arange(len(act.outcome_index)), list(act.outcome_index)] = 1.0
    return incidence


def outcome_difference(x_i: Act, x_j: Act, num_elements: int) -> NDArray[np.float64]:
    """States x elements matrix D with D @ u the per-state utility gap of x_i over x_j."""
    return _outcome_incidence(x_i, num_elements) - _outcome_incidence(x_j, num_elements)


def _gap_coefficients(ps: PreferenceSystem, x_i: Act, x_j: Act, probabilities) -> NDArray:
    """Objective rows c[t, l] = pi_t(X_i = a_l) - pi_t(X_j = a_l)."""
    return np.asarray(probabilities, dtype=float) @ outcome_difference(x_i, x_j, ps.size)


def _check_act(act: Act, ps: PreferenceSystem, num_states: int) -> None:
    if len(act.outcome_index) != num_states:
        raise InputError(
            f"act {act.name!r} has {len(act.outcome_index)} outcomes, expected {num_states}"
        )
    for index in act.outcome_index:
        if not 0 <= index < ps.size:
            raise InputError(f"act {act.name!r} references unknown element {index}")


def expectation_gap_lp(
    ps: PreferenceSystem, delta: float, x_i: Act, x_j: Act, probability
) -> LpProblem:
    """LP minimising E_pi(u o X_i) - E_pi(u o X_j) over the constraint set, for one pi."""
    probability = np.asarray(probability, dtype=float)
    _check_act(x_i, ps, probability.shape[0])
    _check_act(x_j, ps, probability.shape[0])
    return nabla_constraints(ps, delta).with_objective(
        _gap_coefficients(ps, x_i, x_j, probability)
    )


def dominance_lp(
    ps: PreferenceSystem,
    cs: CredalSet,
    delta: float,
    x_i: Act,
    x_j: Act,
    t: int,
    config: Optional[SolverConfig] = None,
) -> LpProblem:
    """The expectation-gap LP at the t-th extreme point of cs.

    Raises InconsistentPreferenceError when the constraint set is empty.
    """
    config = resolve_config(config)
    if not is_delta_consistent(ps, delta, config):
        raise inconsistency_error(ps, float(delta), config)
    if not 0 <= t < cs.num_extreme_points:
        raise InputError(
            f"extreme point index {t} out of range ({cs.num_extreme_points} points)"
        )
    return expectation_gap_lp(ps, delta, x_i, x_j, cs.extreme_points[t])


class DominanceChecker:
    """Pairwise dominance tests sharing one constraint block.

    The block is built and checked for feasibility once; every pair and
    extreme point only swaps the objective. Instances hold no mutable state
    after construction, so verdict() may be called from several threads.
    """

    def __init__(
        self,
        ps: PreferenceSystem,
        cs: CredalSet,
        delta: float,
        config: Optional[SolverConfig] = None,
        backend: Optional[SolverBackend] = None,
    ):
        self.ps = ps
        self.cs = cs
        self.config = resolve_config(config)
        self.backend = backend
        self.block = nabla_constraints(ps, delta)
        self.delta = float(delta)
        if cs.num_extreme_points == 0:
            raise InputError("credal set has no extreme points attached")
        if not solve(self.block, self.config, backend).is_optimal:
            raise inconsistency_error(ps, self.delta, self.config)

    def check_act(self, act: Act) -> None:
        _check_act(act, self.ps, self.cs.space.size)

    def extreme_values(self, x_i: Act, x_j: Act) -> tuple[NDArray, list]:
        """Optimal gap and minimising representation at every extreme point."""
        coefficients = _gap_coefficients(self.ps, x_i, x_j, self.cs.extreme_points)
        values = np.zeros(len(coefficients))
        witnesses: list = [None] * len(coefficients)
        for t, objective in enumerate(coefficients):
            if not np.any(objective):
                continue
            outcome = solve(self.block.with_objective(objective), self.config, self.backend)
            if outcome.status is LpStatus.INFEASIBLE:
                raise inconsistency_error(self.ps, self.delta, self.config)
            if outcome.status is LpStatus.UNBOUNDED:
                raise SolverError("dominance LP reported unbounded over a bounded box")
            values[t] = outcome.optimal_value
            witnesses[t] = outcome.witness
        logger.debug("opt(%s, %s) = %s", x_i.name, x_j.name, values)
        return values, witnesses

    def verdict(self, x_i: Act, x_j: Act) -> PairVerdict:
        self.check_act(x_i)
        self.check_act(x_j)
        if x_i.outcome_index == x_j.outcome_index:
            zeros = np.zeros(self.cs.num_extreme_points)
            return PairVerdict(True, 0.0, extreme_values=zeros)
        values, witnesses = self.extreme_values(x_i, x_j)
        t = int(np.argmin(values))
        min_opt = float(values[t])
        tolerance = self.config.optimality_tolerance
        return PairVerdict(
            holds=min_opt >= -tolerance,
            min_opt=min_opt,
            witness=witnesses[t],
            extreme_index=t,
            marginal=-tolerance <= min_opt < 0.0,
            extreme_values=values,
        )


def dominates(
    ps: PreferenceSystem,
    cs: CredalSet,
    delta: float,
    x_i: Act,
    x_j: Act,
    config: Optional[SolverConfig] = None,
) -> PairVerdict:
    """Whether x_i dominates x_j, with the smallest gap over the extreme points."""
    return DominanceChecker(ps, cs, delta, config).verdict(x_i, x_j)


def _freeze(array) -> NDArray:
    array = np.array(array)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class DominanceRelation:
    """The dominance relation on a list of acts.

    dominates[i, j] means acts[i] dominates acts[j]; opt_values[i, j] is the
    smallest gap over the extreme points and extreme_values[i, j, t] the gap
    at extreme point t. marginal[i, j] marks verdicts inside the tolerance band.
    """

    acts: tuple
    dominates: NDArray[np.bool_]
    delta: float
    opt_values: NDArray[np.float64]
    extreme_values: NDArray[np.float64] = field(repr=False)
    marginal: NDArray[np.bool_] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "acts", tuple(self.acts))
        for name in ("dominates", "opt_values", "extreme_values", "marginal"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))

    @property
    def size(self) -> int:
        return len(self.acts)

    @property
    def names(self) -> list[str]:
        return [act.name for act in self.acts]

    def strict(self) -> NDArray[np.bool_]:
        """strict[i, j]: i dominates j but not the other way round."""
        return self.dominates & ~self.dominates.T

    def indifferent(self) -> NDArray[np.bool_]:
        return self.dominates & self.dominates.T

    def is_transitive(self) -> bool:
        return is_transitive_matrix(self.dominates)

    def marginal_pairs(self) -> list[tuple[str, str]]:
        return [(self.acts[i].name, self.acts[j].name) for i, j in np.argwhere(self.marginal)]


def full_relation(
    ps: PreferenceSystem,
    cs: CredalSet,
    delta: float,
    acts: Sequence[Act],
    config: Optional[SolverConfig] = None,
    backend: Optional[SolverBackend] = None,
) -> DominanceRelation:
    """Decide dominance for every ordered pair of acts.

    Acts with the same outcomes share their LP results. With
    config.workers > 1 the pairs are solved on a thread pool.
    """
    config = resolve_config(config)
    acts = list(acts)
    checker = DominanceChecker(ps, cs, delta, config, backend)
    for act in acts:
        checker.check_act(act)

    n = len(acts)
    num_points = cs.num_extreme_points
    representative: dict[tuple, int] = {}
    for i, act in enumerate(acts):
        representative.setdefault(act.outcome_index, i)
    keys = [representative[act.outcome_index] for act in acts]
    unique_pairs = sorted({(keys[i], keys[j]) for i in range(n) for j in range(n) if keys[i] != keys[j]})

    def evaluate(pair: tuple[int, int]) -> PairVerdict:
        return checker.verdict(acts[pair[0]], acts[pair[1]])

    if config.workers > 1 and len(unique_pairs) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            verdicts = dict(zip(unique_pairs, pool.map(evaluate, unique_pairs)))
    else:
        verdicts = {pair: evaluate(pair) for pair in unique_pairs}

    relation = np.eye(n, dtype=bool)
    opt_values = np.zeros((n, n))
    extreme_values = np.zeros((n, n, num_points))
    marginal = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if keys[i] == keys[j]:
                relation[i, j] = True
                continue
            verdict = verdicts[(keys[i], keys[j])]
            relation[i, j] = verdict.holds
            opt_values[i, j] = verdict.min_opt
            extreme_values[i, j] = verdict.extreme_values
            marginal[i, j] = verdict.marginal

    result = DominanceRelation(
        acts=tuple(acts),
        dominates=relation,
        delta=float(delta),
        opt_values=opt_values,
        extreme_values=extreme_values,
        marginal=marginal,
    )
    logger.info(
        "dominance relation at delta=%.6g: %d of %d off-diagonal pairs hold",
        delta,
        int(relation.sum()) - n,
        n * (n - 1),
    )
    if marginal.any():
        logger.warning(
            "marginal verdicts at delta=%.6g: %s", delta, result.marginal_pairs()
        )
    if not result.is_transitive():
        logger.warning("dominance relation at delta=%.6g is not transitive", delta)
    return result


def maximal_set(rel: DominanceRelation) -> list[Act]:
    """Acts dominating every act, in input order."""
    return [act for i, act in enumerate(rel.acts) if rel.dominates[i].all()]


def undominated_set(rel: DominanceRelation) -> list[Act]:
    """Acts no act strictly dominates, in input order."""
    strict = rel.strict()
    return [act for i, act in enumerate(rel.acts) if not strict[:, i].any()]


@dataclass(frozen=True)
class HasseDiagram:
    """Transitive reduction of the strict part over indifference classes.

    classes holds act names per class, ordered by first member in input
    order; edges are (dominating class, dominated class) index pairs.
    """

    classes: tuple
    edges: tuple

    @property
    def labels(self) -> list[str]:
        return [",".join(members) for members in self.classes]

    def named_edges(self) -> list[tuple[str, str]]:
        labels = self.labels
        return [(labels[a], labels[b]) for a, b in self.edges]


def hasse_edges(rel: DominanceRelation) -> HasseDiagram:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(rel.size))
    graph.add_edges_from(
        (int(i), int(j)) for i, j in np.argwhere(rel.dominates) if i != j
    )
    # mutually dominating acts collapse into one node
    condensed = nx.condensation(graph)
    order = sorted(condensed.nodes, key=lambda node: min(condensed.nodes[node]["members"]))
    position = {node: k for k, node in enumerate(order)}
    classes = tuple(
        tuple(rel.acts[i].name for i in sorted(condensed.nodes[node]["members"]))
        for node in order
    )
    reduced = nx.transitive_reduction(condensed)
    edges = tuple(sorted((position[a], position[b]) for a, b in reduced.edges()))
    return HasseDiagram(classes=classes, edges=edges)
