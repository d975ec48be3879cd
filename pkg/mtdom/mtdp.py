"""Multi-target decision problems and the preference system their evaluations induce."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .config import SolverConfig, resolve_config
from .credal import CredalSet, StateSpace
from .dominance import Act, DominanceRelation, full_relation
from .exceptions import InputError
from .preferences import PreferenceSystem, satisfies_nabla

logger = logging.getLogger(__name__)

ONES = "ones"
ZEROS = "zeros"


@dataclass(frozen=True, eq=False)
class Mtdp:
    """Actions scored on r targets in every state.

    values[a, s, j] is the evaluation of action a in state s on target j.
    Targets 0 .. num_cardinal - 1 are cardinal, the remaining ones ordinal.
    """

    space: StateSpace
    actions: tuple
    values: NDArray[np.float64]
    num_cardinal: int
    targets: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        values = np.array(self.values, dtype=float)
        if not self.actions:
            raise InputError("a decision problem needs at least one action")
        if len(set(self.actions)) != len(self.actions):
            raise InputError("action names must be unique")
        if values.ndim != 3 or values.shape[:2] != (len(self.actions), self.space.size):
            raise InputError(
                f"values have shape {values.shape}, expected "
                f"({len(self.actions)}, {self.space.size}, r)"
            )
        if values.shape[2] == 0:
            raise InputError("a decision problem needs at least one target")
        targets = self.targets or tuple(f"target{j + 1}" for j in range(values.shape[2]))
        if len(targets) != values.shape[2]:
            raise InputError(f"{len(targets)} target names for {values.shape[2]} targets")
        object.__setattr__(self, "targets", tuple(targets))
        bad = np.argwhere(~((values >= 0.0) & (values <= 1.0)))
        if len(bad):
            a, s, j = bad[0]
            raise InputError(
                f"value {values[a, s, j]} of action {self.actions[a]!r} in state "
                f"{self.space.states[s]!r} on target {targets[j]!r} is outside [0, 1]"
            )
        if not 0 <= self.num_cardinal <= values.shape[2]:
            raise InputError(
                f"num_cardinal must lie in [0, {values.shape[2]}], got {self.num_cardinal}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def num_targets(self) -> int:
        return self.values.shape[2]

    def acts(self, vectors: Sequence["EvalVector"]) -> list[Act]:
        """Every action as an act over the evaluation vectors."""
        index = {vector.coords: k for k, vector in enumerate(vectors)}
        acts = []
        for a, name in enumerate(self.actions):
            try:
                outcomes = tuple(index[_coords(row)] for row in self.values[a])
            except KeyError:
                raise InputError(f"action {name!r} has an outcome missing from the vectors")
            acts.append(Act(name, outcomes))
        return acts


def _coords(row) -> tuple:
    return tuple(float(x) for x in row)


@dataclass(frozen=True)
class EvalVector:
    """One consequence: a point of [0, 1]^r with the (action, state) pairs producing it.

    synthetic is "ones" or "zeros" for the added top and bottom vectors.
    """

    coords: tuple
    origins: tuple = field(default=(), compare=False)
    synthetic: Optional[str] = field(default=None, compare=False)

    @property
    def label(self) -> str:
        if self.synthetic:
            return self.synthetic
        return "/".join(f"{action}@{state}" for action, state in self.origins)


def eval_vectors(m: Mtdp) -> list[EvalVector]:
    """The distinct evaluation vectors plus the all-ones and all-zeros vectors.

    The all-ones vector comes first and the all-zeros vector second; observed
    vectors follow in action-major scan order. Equal vectors are merged and
    keep every origin.
    """
    r = m.num_targets
    found: dict[tuple, dict] = {
        _coords(np.ones(r)): {"origins": [], "synthetic": ONES},
        _coords(np.zeros(r)): {"origins": [], "synthetic": ZEROS},
    }
    for a, action in enumerate(m.actions):
        for s, state in enumerate(m.space.states):
            entry = found.setdefault(_coords(m.values[a, s]), {"origins": [], "synthetic": None})
            entry["origins"].append((action, state))
    vectors = [
        EvalVector(coords, tuple(entry["origins"]), entry["synthetic"])
        for coords, entry in found.items()
    ]
    logger.debug(
        "%d evaluation vectors from %d actions x %d states",
        len(vectors),
        len(m.actions),
        m.space.size,
    )
    return vectors


def _matrix(vectors: Sequence[EvalVector]) -> NDArray[np.float64]:
    return np.asarray([vector.coords for vector in vectors], dtype=float)


def build_r1(
    vectors: Sequence[EvalVector], tolerance: float = SolverConfig.comparison_tolerance
) -> frozenset:
    """Index pairs (i, j) with vectors[i] componentwise at least vectors[j]."""
    x = _matrix(vectors)
    at_least = np.all(x[:, None, :] >= x[None, :, :] - tolerance, axis=2)
    return frozenset((int(i), int(j)) for i, j in np.argwhere(at_least))


def build_r2(
    vectors: Sequence[EvalVector],
    r1: frozenset,
    num_cardinal: int,
    tolerance: float = SolverConfig.comparison_tolerance,
) -> frozenset:
    """Pairs of r1 members ((x, y), (x', y')) where the exchange y -> x beats y' -> x'.

    On the cardinal targets the difference x - y must be at least x' - y';
    on the ordinal ones the interval [y'_j, x'_j] must lie inside [y_j, x_j].
    """
    x = _matrix(vectors)
    pairs = sorted(r1)
    if not pairs:
        return frozenset()
    upper = x[[a for a, _ in pairs]]
    lower = x[[b for _, b in pairs]]
    z = num_cardinal

    difference = upper[:, :z] - lower[:, :z]
    cardinal = np.all(difference[:, None, :] >= difference[None, :, :] - tolerance, axis=2)
    ordinal = np.all(
        upper[:, None, z:] >= upper[None, :, z:] - tolerance, axis=2
    ) & np.all(lower[None, :, z:] >= lower[:, None, z:] - tolerance, axis=2)
    holds = cardinal & ordinal
    return frozenset((pairs[p], pairs[q]) for p, q in np.argwhere(holds))


def sub_system(
    m: Mtdp,
    with_differences: bool = True,
    config: Optional[SolverConfig] = None,
    vectors: Optional[Sequence[EvalVector]] = None,
) -> PreferenceSystem:
    """The preference system the evaluation vectors of m induce.

    with_differences=False leaves R2 empty.
    """
    config = resolve_config(config)
    vectors = list(vectors) if vectors is not None else eval_vectors(m)
    tolerance = config.comparison_tolerance
    r1 = build_r1(vectors, tolerance)
    r2 = build_r2(vectors, r1, m.num_cardinal, tolerance) if with_differences else frozenset()
    ps = PreferenceSystem(
        elements=tuple(vectors), r1=r1, r2=r2, top_index=0, bottom_index=1
    )
    logger.info(
        "induced preference system: %d elements, %d R1 pairs, %d R2 pairs",
        ps.size,
        len(r1),
        len(r2),
    )

    # the mean utility always represents the system
    mean = _matrix(vectors).mean(axis=1)
    slack = satisfies_nabla(ps, mean, 0.0)
    if slack < -config.feasibility_tolerance:
        logger.warning("mean utility violates the induced constraints by %.3g", -slack)
    return ps


def delta_dominance(
    m: Mtdp,
    cs: CredalSet,
    delta: float,
    config: Optional[SolverConfig] = None,
    ps: Optional[PreferenceSystem] = None,
) -> DominanceRelation:
    """Dominance between the actions of m, compared through their evaluation vectors."""
    if cs.space.size != m.space.size:
        raise InputError(
            f"credal set has {cs.space.size} states, the decision problem {m.space.size}"
        )
    ps = ps if ps is not None else sub_system(m, config=config)
    return full_relation(ps, cs, delta, m.acts(ps.elements), config)


def uniformly_optimal(
    m: Mtdp, tolerance: float = SolverConfig.comparison_tolerance
) -> list[str]:
    """Actions at least as good as every action in every state and target."""
    values = m.values
    return [
        name
        for a, name in enumerate(m.actions)
        if np.all(values[a][None] >= values - tolerance)
    ]


def pareto_front(
    m: Mtdp, tolerance: float = SolverConfig.comparison_tolerance
) -> list[str]:
    """Actions that no action improves on somewhere without losing anywhere."""
    flat = m.values.reshape(len(m.actions), -1)
    at_least = np.all(flat[:, None, :] >= flat[None, :, :] - tolerance, axis=2)
    better = np.any(flat[:, None, :] > flat[None, :, :] + tolerance, axis=2)
    # dominated[b, a]: b improves on a
    dominated = at_least & better
    return [name for a, name in enumerate(m.actions) if not dominated[:, a].any()]

