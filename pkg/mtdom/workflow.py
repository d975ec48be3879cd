"""The analysis pipeline behind `mtdom run`."""

import logging
from dataclasses import asdict
from functools import cached_property
from typing import Optional, Union

from .config import SolverConfig, resolve_config
from .credal import has_positive_support
from .dominance import hasse_edges, maximal_set, undominated_set
from .exceptions import InconsistentPreferenceError
from .export import emit_dot
from .models import DeltaReport, HasseReport, OracleReport, ProblemFile, Report
from .mtdp import delta_dominance, eval_vectors, pareto_front, sub_system, uniformly_optimal
from .oracle import agreement, sample_utilities
from .preferences import DeltaBound, check_delta, is_delta_consistent, max_delta, prune_r2

logger = logging.getLogger(__name__)

DeltaSpec = Union[str, list[float], None]


def _rounded(value: float) -> float:
    # keeps reports byte-stable across platforms
    return round(float(value), 12)


class DecisionWorkflow:
    """Runs consistency, delta_max, dominance and choice-set computations for one problem."""

    def __init__(
        self,
        problem: ProblemFile,
        config: Optional[SolverConfig] = None,
        prune: bool = False,
    ):
        self.problem = problem
        self.config = resolve_config(config)
        self.mtdp = problem.to_mtdp()
        self.credal = problem.to_credal_set(self.config)
        self.vectors = eval_vectors(self.mtdp)
        system = sub_system(self.mtdp, config=self.config, vectors=self.vectors)
        self.system = prune_r2(system) if prune else system

    @cached_property
    def delta_bound(self) -> DeltaBound:
        return max_delta(self.system, self.config)

    def resolve_deltas(self, deltas: DeltaSpec = None) -> list[float]:
        """Explicit deltas are checked against delta_max; "auto" means 0, delta_max/2, delta_max."""
        deltas = self.problem.deltas if deltas is None else deltas
        bound = self.delta_bound
        if deltas == "auto":
            top = bound.admissible
            resolved = [0.0, top / 2, top]
        else:
            resolved = [check_delta(delta) for delta in deltas]
            for delta in resolved:
                if delta > bound.value + self.config.feasibility_tolerance:
                    raise InconsistentPreferenceError(
                        f"delta = {delta:.12g} exceeds delta_max = {bound.value:.12g}",
                        delta_max=bound.value,
                    )
        return list(dict.fromkeys(resolved))

    def analyse(
        self,
        delta: float,
        oracle_samples: int = 0,
        seed: int = 0,
        include_dot: bool = False,
    ) -> DeltaReport:
        """Dominance relation and choice sets at one delta."""
        relation = delta_dominance(self.mtdp, self.credal, delta, self.config, ps=self.system)
        diagram = hasse_edges(relation)
        oracle = None
        if oracle_samples > 0:
            samples = sample_utilities(self.system, delta, oracle_samples, seed, config=self.config)
            result = agreement(relation, self.system, self.credal, samples, self.config)
            oracle = OracleReport(
                samples=result.samples,
                seed=seed,
                corroborated=result.corroborated,
                contradicted=result.contradicted,
                confirmed=result.confirmed,
                unconfirmed=result.unconfirmed,
                contradictions=[list(pair) for pair in result.contradictions],
            )
        maximal = sorted(act.name for act in maximal_set(relation))
        undominated = sorted(act.name for act in undominated_set(relation))
        logger.info("delta=%.6g: max=%s und=%s", delta, maximal, undominated)
        return DeltaReport(
            delta=_rounded(delta),
            consistent=is_delta_consistent(self.system, delta, self.config),
            dominance=relation.dominates.tolist(),
            opt_values=[[_rounded(x) for x in row] for row in relation.opt_values],
            maximal=maximal,
            undominated=undominated,
            marginal=[list(pair) for pair in relation.marginal_pairs()],
            hasse=HasseReport(
                classes=[list(members) for members in diagram.classes],
                edges=[list(edge) for edge in diagram.named_edges()],
            ),
            dot=emit_dot(relation, diagram) if include_dot else None,
            oracle=oracle,
        )

    def run(
        self,
        deltas: DeltaSpec = None,
        oracle_samples: int = 0,
        seed: int = 0,
        include_dot: bool = False,
    ) -> Report:
        resolved = self.resolve_deltas(deltas)
        bound = self.delta_bound
        positive = has_positive_support(self.credal)
        if not positive:
            logger.warning(
                "some extreme point gives a state probability zero; "
                "undominated actions need not be Pareto optimal"
            )
        return Report(
            actions=list(self.mtdp.actions),
            states=list(self.mtdp.space.states),
            targets=list(self.mtdp.targets),
            num_cardinal=self.mtdp.num_cardinal,
            num_elements=self.system.size,
            delta_max=_rounded(bound.value),
            delta_max_at_boundary=bound.at_boundary,
            positive_support=positive,
            uniformly_optimal=sorted(uniformly_optimal(self.mtdp, self.config.comparison_tolerance)),
            pareto_front=sorted(pareto_front(self.mtdp, self.config.comparison_tolerance)),
            deltas=[
                self.analyse(delta, oracle_samples, seed, include_dot) for delta in resolved
            ],
            settings={name: float(value) for name, value in asdict(self.config).items()},
        )
