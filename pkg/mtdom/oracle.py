"""Sampling cross-check of dominance verdicts.

Utilities are drawn by a hit-and-run walk inside the constraint set and
probabilities as random mixtures of extreme points. A sampled pair with a
negative expectation gap refutes dominance; the absence of one only
corroborates it.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space

from .config import SolverConfig, resolve_config
from .credal import CredalSet
from .dominance import Act, DominanceRelation, outcome_difference
from .exceptions import InputError, SolverError
from .lp import LpProblem, LpStatus, solve
from .preferences import PreferenceSystem, check_delta, inconsistency_error

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence, None]

# directions barely moving a constraint do not bound the step
_RATE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SampledUtility:
    """A utility vector inside the constraint set and its smallest constraint slack."""

    values: NDArray[np.float64]
    margin: float
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class Counterexample:
    """A utility and a probability under which the first act falls behind by gap."""

    utility: NDArray[np.float64]
    probability: NDArray[np.float64]
    gap: float


class UtilitySampler:
    """Hit-and-run walk over the normalised representations with margin delta.

    The equalities are eliminated by walking in their null space; the walk
    starts from the point maximising the smallest slack of the remaining
    inequalities. When that slack is zero, or no direction is left, the
    sampler is degenerate and returns its start point every time.
    """

    def __init__(
        self,
        ps: PreferenceSystem,
        delta: float,
        seed: Seed = None,
        burn_in: Optional[int] = None,
        config: Optional[SolverConfig] = None,
    ):
        self.config = resolve_config(config)
        self.ps = ps
        self.delta = check_delta(delta)
        self.burn_in = self.config.burn_in if burn_in is None else burn_in
        if self.burn_in < 0:
            raise InputError("burn_in must be non-negative")
        self.rng = np.random.default_rng(seed)

        n = ps.size
        rows = ps.nabla_rows
        # every inequality as G @ v >= h, the box included
        self.ineq_matrix = np.vstack([rows.strict_matrix, np.eye(n), -np.eye(n)])
        self.ineq_rhs = np.concatenate(
            [np.full(rows.strict_matrix.shape[0], self.delta), np.zeros(n), -np.ones(n)]
        )
        self.basis = null_space(rows.eq_matrix)
        projected = self.ineq_matrix @ self.basis
        moving = np.any(np.abs(projected) > _RATE_TOLERANCE, axis=1)
        self._projected = projected[moving]
        self._moving_matrix = self.ineq_matrix[moving]
        self._moving_rhs = self.ineq_rhs[moving]

        self.start, self.start_slack = self._interior_point(moving)
        self.degenerate = (
            self.basis.shape[1] == 0 or self.start_slack <= self.config.feasibility_tolerance
        )
        if self.degenerate:
            logger.warning(
                "constraint set at delta=%.6g has no interior; sampling its single start point",
                self.delta,
            )
        self._current = self.start.copy()

    def _interior_point(self, moving: NDArray[np.bool_]) -> tuple[NDArray, float]:
        """Maximise s subject to every non-fixed inequality holding with slack s."""
        n = self.ps.size
        rows = self.ps.nabla_rows
        objective = np.zeros(n + 1)
        objective[n] = -1.0
        ineq = np.hstack([self.ineq_matrix, -moving.astype(float)[:, None]])
        eq = np.hstack([rows.eq_matrix, np.zeros((rows.eq_matrix.shape[0], 1))])
        bounds = np.tile([0.0, 1.0], (n + 1, 1))
        problem = LpProblem.from_arrays(objective, eq, rows.eq_rhs, ineq, self.ineq_rhs, bounds)
        outcome = solve(problem, self.config)
        if outcome.status is LpStatus.INFEASIBLE:
            raise inconsistency_error(self.ps, self.delta, self.config)
        if not outcome.is_optimal:
            raise SolverError(f"interior point LP ended {outcome.status.value}")
        return outcome.witness[:n], float(outcome.witness[n])

    def _step(self) -> None:
        direction = self.rng.standard_normal(self.basis.shape[1])
        direction /= np.linalg.norm(direction)
        rate = self._projected @ direction
        slack = np.maximum(self._moving_matrix @ self._current - self._moving_rhs, 0.0)
        # slack + t * rate >= 0 on every row
        rising = rate > _RATE_TOLERANCE
        falling = rate < -_RATE_TOLERANCE
        lower = np.max(-slack[rising] / rate[rising]) if rising.any() else 0.0
        upper = np.min(slack[falling] / -rate[falling]) if falling.any() else 0.0
        if upper <= lower:
            return
        step = self.rng.uniform(lower, upper)
        self._current = self._current + step * (self.basis @ direction)

    def margin(self, v) -> float:
        """Smallest inequality slack at v; minus the equality residual if v is off the hull."""
        rows = self.ps.nabla_rows
        residual = float(np.max(np.abs(rows.eq_matrix @ v - rows.eq_rhs)))
        if residual > self.config.feasibility_tolerance:
            return -residual
        return float(np.min(self.ineq_matrix @ v - self.ineq_rhs))

    def sample(self) -> SampledUtility:
        """Advance the walk by burn_in steps and return the point reached."""
        if self.degenerate:
            return SampledUtility(self.start.copy(), max(self.start_slack, 0.0), True)
        for _ in range(max(self.burn_in, 1)):
            self._step()
        margin = self.margin(self._current)
        if margin < -self.config.feasibility_tolerance:
            logger.warning("walk left the constraint set by %.3g; restarting", -margin)
            self._current = self.start.copy()
            margin = self.start_slack
        return SampledUtility(self._current.copy(), max(margin, 0.0))

    def samples(self, count: int) -> list[SampledUtility]:
        return [self.sample() for _ in range(count)]


def sample_utilities(
    ps: PreferenceSystem,
    delta: float,
    count: int,
    seed: Seed = None,
    burn_in: Optional[int] = None,
    config: Optional[SolverConfig] = None,
) -> list[SampledUtility]:
    """count utilities from the constraint set, reproducible for a fixed seed."""
    return UtilitySampler(ps, delta, seed, burn_in, config).samples(count)


def _utility_matrix(samples: Sequence[SampledUtility]) -> NDArray[np.float64]:
    return np.asarray([sample.values for sample in samples], dtype=float)


def refute_dominance(
    ps: PreferenceSystem,
    cs: CredalSet,
    delta: float,
    x_i: Act,
    x_j: Act,
    count: int,
    seed: Seed = None,
    burn_in: Optional[int] = None,
    config: Optional[SolverConfig] = None,
) -> Optional[Counterexample]:
    """First sampled (u, pi) with E_pi(u o x_i) < E_pi(u o x_j) - tolerance, if any.

    Each sampled utility is tried against every extreme point and one random
    mixture of them.
    """
    config = resolve_config(config)
    if cs.num_extreme_points == 0:
        raise InputError("credal set has no extreme points attached")
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    utility_seed, mixture_seed = seed.spawn(2)
    samples = sample_utilities(ps, delta, count, utility_seed, burn_in, config)
    if x_i.outcome_index == x_j.outcome_index or not samples:
        return None

    mixtures = np.random.default_rng(mixture_seed).dirichlet(
        np.ones(cs.num_extreme_points), size=len(samples)
    ) @ cs.extreme_points
    state_gaps = _utility_matrix(samples) @ outcome_difference(x_i, x_j, ps.size).T
    point_gaps = state_gaps @ cs.extreme_points.T
    mixture_gaps = np.sum(state_gaps * mixtures, axis=1)

    for k in range(len(samples)):
        t = int(np.argmin(point_gaps[k]))
        if mixture_gaps[k] < point_gaps[k, t]:
            probability, gap = mixtures[k], float(mixture_gaps[k])
        else:
            probability, gap = cs.extreme_points[t], float(point_gaps[k, t])
        if gap < -config.optimality_tolerance:
            logger.debug("%s vs %s refuted by sample %d (gap %.3g)", x_i.name, x_j.name, k, gap)
            return Counterexample(samples[k].values, np.array(probability), gap)
    return None


@dataclass(frozen=True)
class OracleAgreement:
    """How sampled utilities bear on the LP verdicts of a relation.

    corroborated: dominance with no counterexample among the samples.
    contradicted: dominance the samples refute.
    confirmed: non-dominance the samples refute as well.
    unconfirmed: non-dominance the samples did not reproduce.
    """

    samples: int
    corroborated: int = 0
    contradicted: int = 0
    confirmed: int = 0
    unconfirmed: int = 0
    contradictions: tuple = field(default=())

    @property
    def agrees(self) -> bool:
        return self.contradicted == 0


def agreement(
    relation: DominanceRelation,
    ps: PreferenceSystem,
    cs: CredalSet,
    samples: Sequence[SampledUtility],
    config: Optional[SolverConfig] = None,
) -> OracleAgreement:
    """Compare every off-diagonal verdict of relation with the sampled utilities."""
    config = resolve_config(config)
    utilities = _utility_matrix(samples)
    counts = {"corroborated": 0, "contradicted": 0, "confirmed": 0, "unconfirmed": 0}
    contradictions = []
    for i, x_i in enumerate(relation.acts):
        for j, x_j in enumerate(relation.acts):
            if i == j:
                continue
            refuted = False
            if len(utilities) and x_i.outcome_index != x_j.outcome_index:
                gaps = utilities @ outcome_difference(x_i, x_j, ps.size).T @ cs.extreme_points.T
                refuted = bool(np.any(gaps < -config.optimality_tolerance))
            if relation.dominates[i, j]:
                key = "contradicted" if refuted else "corroborated"
                if refuted:
                    contradictions.append((x_i.name, x_j.name))
            else:
                key = "confirmed" if refuted else "unconfirmed"
            counts[key] += 1
    result = OracleAgreement(
        samples=len(samples), contradictions=tuple(contradictions), **counts
    )
    logger.info(
        "oracle at delta=%.6g: %d corroborated, %d contradicted, %d confirmed, %d unconfirmed",
        relation.delta,
        result.corroborated,
        result.contradicted,
        result.confirmed,
        result.unconfirmed,
    )
    if not result.agrees:
        logger.warning("oracle refutes LP dominance for %s", list(contradictions))
    return result
