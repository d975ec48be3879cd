"""Solver-agnostic linear programs: problem statement, outcome, and backends."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

from .config import SolverConfig, resolve_config
from .exceptions import LpInputError, SolverError

logger = logging.getLogger(__name__)


def _as_matrix(rows, num_vars: int, name: str) -> NDArray[np.float64]:
    matrix = np.asarray(rows, dtype=float)
    if matrix.size == 0:
        return np.zeros((0, num_vars))
    if matrix.ndim != 2 or matrix.shape[1] != num_vars:
        raise LpInputError(
            f"{name} has shape {matrix.shape}, expected (k, {num_vars})"
        )
    return matrix


def _as_vector(values, length: int, name: str) -> NDArray[np.float64]:
    vector = np.asarray(values, dtype=float).reshape(-1)
    if vector.shape[0] != length:
        raise LpInputError(f"{name} has length {vector.shape[0]}, expected {length}")
    return vector


@dataclass(frozen=True, eq=False)
class LpProblem:
    """A minimisation problem over num_vars real variables.

    Equality rows mean ``eq_matrix @ v == eq_rhs``; inequality rows mean
    ``ineq_matrix @ v >= ineq_rhs``. Bounds are per-variable ``[lo, hi]``
    pairs where ``-inf``/``inf`` mark a missing bound.
    """

    objective: NDArray[np.float64]
    eq_matrix: NDArray[np.float64]
    eq_rhs: NDArray[np.float64]
    ineq_matrix: NDArray[np.float64]
    ineq_rhs: NDArray[np.float64]
    bounds: NDArray[np.float64]

    @classmethod
    def build(
        cls,
        objective,
        eq_constraints=(),
        ineq_constraints=(),
        bounds=None,
    ) -> "LpProblem":
        """Build a problem from (coeffs, rhs) constraint lists."""
        objective = np.asarray(objective, dtype=float).reshape(-1)
        num_vars = objective.shape[0]
        eq_rows = [coeffs for coeffs, _ in eq_constraints]
        ineq_rows = [coeffs for coeffs, _ in ineq_constraints]
        return cls.from_arrays(
            objective,
            _as_matrix(eq_rows, num_vars, "equality constraints"),
            [rhs for _, rhs in eq_constraints],
            _as_matrix(ineq_rows, num_vars, "inequality constraints"),
            [rhs for _, rhs in ineq_constraints],
            bounds,
        )

    @classmethod
    def from_arrays(
        cls, objective, eq_matrix, eq_rhs, ineq_matrix, ineq_rhs, bounds=None
    ) -> "LpProblem":
        """Build a problem from dense arrays, validating every dimension."""
        objective = np.asarray(objective, dtype=float).reshape(-1)
        num_vars = objective.shape[0]
        if num_vars == 0:
            raise LpInputError("LP must have at least one variable")
        eq_matrix = _as_matrix(eq_matrix, num_vars, "eq_matrix")
        ineq_matrix = _as_matrix(ineq_matrix, num_vars, "ineq_matrix")
        eq_rhs = _as_vector(eq_rhs, eq_matrix.shape[0], "eq_rhs")
        ineq_rhs = _as_vector(ineq_rhs, ineq_matrix.shape[0], "ineq_rhs")
        if bounds is None:
            bounds = np.tile([-np.inf, np.inf], (num_vars, 1))
        bounds = np.asarray(bounds, dtype=float)
        if bounds.shape != (num_vars, 2):
            raise LpInputError(
                f"bounds has shape {bounds.shape}, expected ({num_vars}, 2)"
            )
        if np.any(bounds[:, 0] > bounds[:, 1]):
            raise LpInputError("every bound must satisfy lo <= hi")
        if not (
            np.all(np.isfinite(objective))
            and np.all(np.isfinite(eq_matrix))
            and np.all(np.isfinite(ineq_matrix))
            and np.all(np.isfinite(eq_rhs))
            and np.all(np.isfinite(ineq_rhs))
        ):
            raise LpInputError("LP coefficients must be finite")
        return cls(objective, eq_matrix, eq_rhs, ineq_matrix, ineq_rhs, bounds)

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    def with_objective(self, objective) -> "LpProblem":
        """Same constraint block, new objective."""
        objective = _as_vector(objective, self.num_vars, "objective")
        if not np.all(np.isfinite(objective)):
            raise LpInputError("LP coefficients must be finite")
        return replace(self, objective=objective)

    def max_violation(self, v) -> float:
        """Largest violation of any constraint or bound at v (0 when feasible)."""
        v = _as_vector(v, self.num_vars, "point")
        violations = [0.0]
        if self.eq_matrix.shape[0]:
            violations.append(float(np.max(np.abs(self.eq_matrix @ v - self.eq_rhs))))
        if self.ineq_matrix.shape[0]:
            violations.append(float(np.max(self.ineq_rhs - self.ineq_matrix @ v)))
        violations.append(float(np.max(self.bounds[:, 0] - v)))
        violations.append(float(np.max(v - self.bounds[:, 1])))
        return max(violations)


class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True, eq=False)
class LpOutcome:
    """Solver verdict; value and witness are present iff the status is Optimal."""

    status: LpStatus
    optimal_value: Optional[float] = None
    witness: Optional[NDArray[np.float64]] = field(default=None, repr=False)

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class SolverBackend(ABC):
    """Abstract base class for LP solver backends."""

    @abstractmethod
    def solve(self, problem: LpProblem, config: SolverConfig) -> LpOutcome:
        """Solve a minimisation problem."""
        pass


class HighsBackend(SolverBackend):
    """scipy's HiGHS interface (dual simplex, so witnesses are basic solutions)."""

    # Exit codes of scipy.optimize.linprog
    _STATUS = {0: LpStatus.OPTIMAL, 2: LpStatus.INFEASIBLE, 3: LpStatus.UNBOUNDED}

    def solve(self, problem: LpProblem, config: SolverConfig) -> LpOutcome:
        tolerance = max(min(config.feasibility_tolerance, 1e-7), 1e-10)
        bounds = [
            (None if np.isinf(lo) else lo, None if np.isinf(hi) else hi)
            for lo, hi in problem.bounds
        ]
        has_eq = problem.eq_matrix.shape[0] > 0
        has_ineq = problem.ineq_matrix.shape[0] > 0

        def run(presolve: bool):
            return linprog(
                problem.objective,
                # linprog wants A_ub @ v <= b_ub
                A_ub=-problem.ineq_matrix if has_ineq else None,
                b_ub=-problem.ineq_rhs if has_ineq else None,
                A_eq=problem.eq_matrix if has_eq else None,
                b_eq=problem.eq_rhs if has_eq else None,
                bounds=bounds,
                method="highs-ds",
                options={
                    "presolve": presolve,
                    "primal_feasibility_tolerance": tolerance,
                    "dual_feasibility_tolerance": tolerance,
                },
            )

        result = run(presolve=True)
        if result.status == 4:
            # presolve can only say "unbounded or infeasible"; the simplex tells which
            result = run(presolve=False)
        status = self._STATUS.get(result.status)
        if status is None:
            raise SolverError(f"HiGHS failed (status {result.status}): {result.message}")
        if status is not LpStatus.OPTIMAL:
            return LpOutcome(status)
        return LpOutcome(status, float(result.fun), np.asarray(result.x, dtype=float))


_default_backend = HighsBackend()


def solve(
    problem: LpProblem,
    config: Optional[SolverConfig] = None,
    backend: Optional[SolverBackend] = None,
) -> LpOutcome:
    """Solve an LP and re-check the witness of an Optimal outcome by substitution."""
    config = resolve_config(config)
    outcome = (backend or _default_backend).solve(problem, config)
    logger.debug(
        "LP with %d vars, %d eq, %d ineq rows: %s %s",
        problem.num_vars,
        problem.eq_matrix.shape[0],
        problem.ineq_matrix.shape[0],
        outcome.status.value,
        outcome.optimal_value,
    )
    if outcome.is_optimal:
        violation = problem.max_violation(outcome.witness)
        if violation > config.feasibility_tolerance:
            logger.warning(
                "LP witness violates a constraint by %.3g (tolerance %.3g)",
                violation,
                config.feasibility_tolerance,
            )
    return outcome
