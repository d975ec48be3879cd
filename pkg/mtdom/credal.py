"""Finitely generated credal sets over a finite state space."""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .config import SolverConfig, resolve_config
from .exceptions import (
    EnumerationTooLargeError,
    InfeasibleCredalSetError,
    InputError,
)

logger = logging.getLogger(__name__)

# Tolerance used to validate hand-supplied probability vectors
PROBABILITY_TOLERANCE = SolverConfig.feasibility_tolerance


def _frozen(array) -> NDArray[np.float64]:
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class StateSpace:
    """Finite, indexed set of states of nature."""

    states: tuple

    def __post_init__(self):
        if len(self.states) == 0:
            raise InputError("a state space needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise InputError("state names must be unique")

    @classmethod
    def of(cls, states: Iterable[str]) -> "StateSpace":
        return cls(tuple(states))

    @classmethod
    def numbered(cls, size: int) -> "StateSpace":
        """States s1, ..., s<size>."""
        return cls(tuple(f"s{i + 1}" for i in range(size)))

    @property
    def size(self) -> int:
        return len(self.states)


@dataclass(frozen=True, eq=False)
class ExpectationBound:
    """The constraint lo <= E_pi(f) <= hi; infinite bounds are allowed."""

    f: NDArray[np.float64]
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "f", _frozen(self.f))
        if self.lo > self.hi:
            raise InputError(f"expectation bound has lo={self.lo} > hi={self.hi}")


@dataclass(frozen=True, eq=False)
class CredalSet:
    """A credal set in constraint form, with its extreme points when known.

    Every attached extreme point is a probability vector satisfying every
    constraint. An empty extreme point array means the points have not been
    computed yet (see enumerate_extreme_points).
    """

    space: StateSpace
    constraints: tuple = ()
    extreme_points: NDArray[np.float64] = None

    def __post_init__(self):
        m = self.space.size
        points = np.zeros((0, m)) if self.extreme_points is None else self.extreme_points
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.size == 0:
            points = np.zeros((0, m))
        if points.shape[1] != m:
            raise InputError(f"extreme points have {points.shape[1]} entries, expected {m}")
        object.__setattr__(self, "extreme_points", _frozen(points))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for bound in self.constraints:
            if bound.f.shape != (m,):
                raise InputError(f"constraint function has {bound.f.shape[0]} entries, expected {m}")
        for k, point in enumerate(points):
            if not self.contains(point):
                raise InputError(f"extreme point {k} is not a member of the credal set")

    @property
    def num_extreme_points(self) -> int:
        return self.extreme_points.shape[0]

    def contains(self, pi, tolerance: float = PROBABILITY_TOLERANCE) -> bool:
        """Whether pi is a probability vector satisfying every constraint."""
        pi = np.asarray(pi, dtype=float)
        if pi.shape != (self.space.size,):
            return False
        if np.any(pi < -tolerance) or abs(pi.sum() - 1.0) > tolerance:
            return False
        for bound in self.constraints:
            value = float(bound.f @ pi)
            if value < bound.lo - tolerance or value > bound.hi + tolerance:
                return False
        return True

    def with_extreme_points(self, points) -> "CredalSet":
        return CredalSet(self.space, self.constraints, points)


def ordered_family(space: StateSpace) -> CredalSet:
    """All pi with pi(s1) >= pi(s2) >= ... >= pi(sm).

    The k-th extreme point is uniform on the first k states.
    """
    m = space.size
    constraints = []
    for ell in range(m - 1):
        f = np.zeros(m)
        f[ell], f[ell + 1] = 1.0, -1.0
        constraints.append(ExpectationBound(f, 0.0, 1.0))
    points = np.zeros((m, m))
    for k in range(1, m + 1):
        points[k - 1, :k] = 1.0 / k
    return CredalSet(space, tuple(constraints), points)


def full_simplex(space: StateSpace) -> CredalSet:
    """Every probability vector; the extreme points are the Dirac vectors."""
    return CredalSet(space, (), np.eye(space.size))


def probability_intervals(
    space: StateSpace,
    lower: Sequence[float],
    upper: Sequence[float],
    config: Optional[SolverConfig] = None,
) -> CredalSet:
    """Credal set of pi with lower[i] <= pi(s_i) <= upper[i], vertices enumerated."""
    m = space.size
    if len(lower) != m or len(upper) != m:
        raise InputError(f"interval bounds need {m} entries each")
    constraints = tuple(
        ExpectationBound(np.eye(m)[i], float(lower[i]), float(upper[i])) for i in range(m)
    )
    credal = CredalSet(space, constraints)
    return credal.with_extreme_points(enumerate_extreme_points(credal, config))


def enumerate_extreme_points(
    cs: CredalSet, config: Optional[SolverConfig] = None
) -> NDArray[np.float64]:
    """Vertices of the constraint polytope, by enumerating basic feasible solutions.

    Every choice of m - 1 facet inequalities, together with sum(pi) = 1, gives
    a square system; feasible solutions are vertices. Near-duplicates coming
    from degenerate bases are merged.
    """
    config = resolve_config(config)
    m = cs.space.size
    if m > config.max_enumeration_states:
        raise EnumerationTooLargeError(
            f"{m} states is too large for exact enumeration "
            f"(limit {config.max_enumeration_states})"
        )
    if len(cs.constraints) > config.max_enumeration_constraints:
        raise EnumerationTooLargeError(
            f"{len(cs.constraints)} constraints is too large for exact enumeration "
            f"(limit {config.max_enumeration_constraints})"
        )

    # facets a @ pi >= b
    facet_rows = [np.eye(m)[i] for i in range(m)]
    facet_rhs = [0.0] * m
    for bound in cs.constraints:
        if np.isfinite(bound.lo):
            facet_rows.append(bound.f)
            facet_rhs.append(bound.lo)
        if np.isfinite(bound.hi):
            facet_rows.append(-bound.f)
            facet_rhs.append(-bound.hi)
    facets = np.asarray(facet_rows, dtype=float)
    rhs = np.asarray(facet_rhs, dtype=float)
    tolerance = config.feasibility_tolerance * 100

    vertices: list[NDArray[np.float64]] = []
    for active in itertools.combinations(range(len(facets)), m - 1):
        system = np.vstack([np.ones((1, m)), facets[list(active)]])
        target = np.concatenate([[1.0], rhs[list(active)]])
        if np.linalg.matrix_rank(system) < m:
            continue
        pi = np.linalg.solve(system, target)
        if np.any(facets @ pi < rhs - tolerance):
            continue
        pi = np.where(np.abs(pi) < tolerance, 0.0, pi)
        if any(
            np.max(np.abs(pi - seen)) <= config.vertex_merge_tolerance for seen in vertices
        ):
            continue
        vertices.append(pi)

    if not vertices:
        raise InfeasibleCredalSetError("the credal set constraints admit no probability vector")
    logger.debug("enumerated %d extreme points over %d states", len(vertices), m)
    # deterministic order: lexicographically descending
    return np.asarray(sorted(vertices, key=lambda v: tuple(-v)))


def smoothed(cs: CredalSet, epsilon: float) -> CredalSet:
    """Mix the credal set with the uniform distribution: (1 - epsilon) pi + epsilon / m.

    For 0 < epsilon < 1 every extreme point of the result gives every state
    positive probability.
    """
    if not 0.0 < epsilon < 1.0:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if cs.num_extreme_points == 0:
        raise InputError("credal set has no extreme points attached")
    m = cs.space.size
    uniform = np.full(m, 1.0 / m)
    constraints = [
        ExpectationBound(
            bound.f,
            (1 - epsilon) * bound.lo + epsilon * float(bound.f @ uniform),
            (1 - epsilon) * bound.hi + epsilon * float(bound.f @ uniform),
        )
        for bound in cs.constraints
    ]
    constraints += [ExpectationBound(np.eye(m)[i], epsilon / m, 1.0) for i in range(m)]
    points = (1 - epsilon) * cs.extreme_points + epsilon * uniform
    return CredalSet(cs.space, tuple(constraints), points)


def has_positive_support(cs: CredalSet, tolerance: float = 0.0) -> bool:
    """Whether every extreme point gives every state probability above tolerance."""
    return cs.num_extreme_points > 0 and bool(np.all(cs.extreme_points > tolerance))


def lower_expectation(cs: CredalSet, g) -> float:
    """Minimum of E_pi(g) over the credal set, attained at an extreme point."""
    if cs.num_extreme_points == 0:
        raise InputError("credal set has no extreme points attached")
    g = np.asarray(g, dtype=float)
    if g.shape != (cs.space.size,):
        raise InputError(f"gamble has {g.shape} entries, expected ({cs.space.size},)")
    return float(np.min(cs.extreme_points @ g))
