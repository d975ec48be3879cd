"""Pydantic models for problem files and reports."""

import math
from typing import Annotated, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .config import SolverConfig
from .credal import (
    CredalSet,
    ExpectationBound,
    StateSpace,
    enumerate_extreme_points,
    full_simplex,
    ordered_family,
)
from .mtdp import Mtdp


class ActionSpec(BaseModel):
    """One action and its evaluations."""

    name: str = Field(..., description="Action name, unique within the problem")
    values: List[List[float]] = Field(
        ..., description="Evaluations in [0, 1]: one row per state, one entry per target"
    )


class OrderedCredal(BaseModel):
    """All distributions with pi(s1) >= pi(s2) >= ... in state order."""

    kind: Literal["ordered"] = "ordered"


class SimplexCredal(BaseModel):
    """Every distribution over the states."""

    kind: Literal["simplex"] = "simplex"


class ConstraintEntry(BaseModel):
    """lo <= E_pi(coeffs) <= hi; a missing bound is unbounded."""

    coeffs: List[float] = Field(..., description="One coefficient per state")
    lo: Optional[float] = Field(None, description="Lower bound on the expectation")
    hi: Optional[float] = Field(None, description="Upper bound on the expectation")

    @model_validator(mode="before")
    @classmethod
    def accept_triples(cls, data):
        if isinstance(data, (list, tuple)) and len(data) == 3:
            return {"coeffs": data[0], "lo": data[1], "hi": data[2]}
        return data


class ConstraintsCredal(BaseModel):
    """Credal set given by expectation bounds; extreme points are enumerated."""

    kind: Literal["constraints"] = "constraints"
    entries: List[ConstraintEntry] = Field(default_factory=list)


class ExtremePointsCredal(BaseModel):
    """Credal set given by its extreme points."""

    kind: Literal["extreme_points"] = "extreme_points"
    points: List[List[float]] = Field(..., min_length=1)


CredalSpec = Annotated[
    Union[OrderedCredal, SimplexCredal, ConstraintsCredal, ExtremePointsCredal],
    Field(discriminator="kind"),
]


class ProblemFile(BaseModel):
    """A multi-target decision problem with its credal set and granularities."""

    states: List[str] = Field(..., min_length=1, description="State names in order")
    targets: Optional[List[str]] = Field(None, description="Target names in order")
    actions: List[ActionSpec] = Field(..., min_length=1)
    num_cardinal: int = Field(..., ge=0, description="Leading targets on a cardinal scale")
    credal: CredalSpec = Field(..., description="Credal set over the states")
    deltas: Union[Literal["auto"], List[float]] = Field(
        "auto", description='Granularities to evaluate, or "auto" for 0, delta_max/2, delta_max'
    )

    @model_validator(mode="after")
    def check_dimensions(self) -> "ProblemFile":
        m = len(self.states)
        if len(set(self.states)) != m:
            raise ValueError("state names must be unique")
        names = [action.name for action in self.actions]
        if len(set(names)) != len(names):
            raise ValueError("action names must be unique")

        r = len(self.actions[0].values[0]) if self.actions[0].values else 0
        if r == 0:
            raise ValueError("actions need at least one target value")
        targets = self.targets or [f"target{j + 1}" for j in range(r)]
        if len(targets) != r:
            raise ValueError(f"{len(targets)} target names for {r} targets")
        for action in self.actions:
            if len(action.values) != m:
                raise ValueError(
                    f"action {action.name!r} has {len(action.values)} rows, expected {m} states"
                )
            for state, row in zip(self.states, action.values):
                if len(row) != r:
                    raise ValueError(
                        f"action {action.name!r} in state {state!r} has {len(row)} values, "
                        f"expected {r}"
                    )
                for target, value in zip(targets, row):
                    if not 0.0 <= value <= 1.0:
                        raise ValueError(
                            f"value {value} of action {action.name!r} in state {state!r} "
                            f"on target {target!r} is outside [0, 1]"
                        )
        if self.num_cardinal > r:
            raise ValueError(f"num_cardinal = {self.num_cardinal} exceeds {r} targets")

        if isinstance(self.credal, ConstraintsCredal):
            for k, entry in enumerate(self.credal.entries):
                if len(entry.coeffs) != m:
                    raise ValueError(f"credal entry {k} has {len(entry.coeffs)} coefficients, expected {m}")
        if isinstance(self.credal, ExtremePointsCredal):
            for k, point in enumerate(self.credal.points):
                if len(point) != m:
                    raise ValueError(f"extreme point {k} has {len(point)} entries, expected {m}")
        if self.deltas != "auto":
            for delta in self.deltas:
                if not 0.0 <= delta < 1.0:
                    raise ValueError(f"delta {delta} is outside [0, 1)")
        return self

    @property
    def space(self) -> StateSpace:
        return StateSpace.of(self.states)

    def to_mtdp(self) -> Mtdp:
        return Mtdp(
            space=self.space,
            actions=tuple(action.name for action in self.actions),
            values=np.array([action.values for action in self.actions], dtype=float),
            num_cardinal=self.num_cardinal,
            targets=tuple(self.targets) if self.targets else None,
        )

    def to_credal_set(self, config: Optional[SolverConfig] = None) -> CredalSet:
        space = self.space
        credal = self.credal
        if isinstance(credal, OrderedCredal):
            return ordered_family(space)
        if isinstance(credal, SimplexCredal):
            return full_simplex(space)
        if isinstance(credal, ExtremePointsCredal):
            return CredalSet(space, (), np.array(credal.points, dtype=float))
        constraints = tuple(
            ExpectationBound(
                np.array(entry.coeffs, dtype=float),
                -math.inf if entry.lo is None else entry.lo,
                math.inf if entry.hi is None else entry.hi,
            )
            for entry in credal.entries
        )
        cs = CredalSet(space, constraints)
        return cs.with_extreme_points(enumerate_extreme_points(cs, config))


class OracleReport(BaseModel):
    """Agreement of the sampling oracle with the LP verdicts at one delta."""

    samples: int
    seed: Optional[int] = None
    corroborated: int
    contradicted: int
    confirmed: int
    unconfirmed: int
    contradictions: List[List[str]] = Field(default_factory=list)


class HasseReport(BaseModel):
    classes: List[List[str]] = Field(..., description="Indifference classes in input order")
    edges: List[List[str]] = Field(..., description="Reduction edges as [dominating, dominated] labels")


class DeltaReport(BaseModel):
    """Everything computed at one granularity."""

    delta: float
    consistent: bool
    dominance: List[List[bool]] = Field(..., description="dominance[i][j]: action i dominates j")
    opt_values: List[List[float]] = Field(..., description="Smallest expectation gap per pair")
    maximal: List[str]
    undominated: List[str]
    marginal: List[List[str]] = Field(default_factory=list)
    hasse: HasseReport
    dot: Optional[str] = None
    oracle: Optional[OracleReport] = None


class Report(BaseModel):
    """Machine-readable result of a run; choice sets are sorted name arrays."""

    actions: List[str]
    states: List[str]
    targets: List[str]
    num_cardinal: int
    num_elements: int = Field(..., description="Distinct evaluation vectors, top and bottom included")
    delta_max: float
    delta_max_at_boundary: bool
    positive_support: bool = Field(
        ..., description="Whether every extreme point charges every state"
    )
    uniformly_optimal: List[str]
    pareto_front: List[str]
    deltas: List[DeltaReport]
    settings: Dict[str, float] = Field(default_factory=dict)
