"""End-to-end checks on the bundled algorithm comparison."""

import numpy as np
import pytest

from mtdom.dominance import DominanceChecker, expectation_gap_lp
from mtdom.exceptions import InconsistentPreferenceError
from mtdom.lp import solve
from mtdom.mtdp import delta_dominance
from mtdom.oracle import agreement, sample_utilities
from mtdom.preferences import is_delta_consistent, satisfies_nabla
from mtdom.storage import load_example
from mtdom.workflow import DecisionWorkflow

ALL_ACTIONS = ["A1", "A2", "A3", "A4", "A5", "A6"]

DELTA_MAX = 1 / 27

AUTO_DELTAS = ["zero", "half", "max"]


@pytest.fixture(scope="module")
def relations(example_workflow):
    """Dominance relation at each auto delta, keyed by name."""
    workflow = example_workflow
    deltas = workflow.resolve_deltas("auto")
    return {
        name: delta_dominance(
            workflow.mtdp, workflow.credal, delta, workflow.config, ps=workflow.system
        )
        for name, delta in zip(AUTO_DELTAS, deltas)
    }


class TestAlgorithmComparison:
    """Choice sets of the six algorithms at delta = 0, delta_max / 2 and delta_max."""

    def test_baselines(self, example_report):
        """No algorithm wins everywhere and none is Pareto dominated."""
        assert example_report.pareto_front == ALL_ACTIONS
        assert example_report.uniformly_optimal == []

    def test_undominated_sets(self, example_report):
        """Undominated sets shrink to A1 as delta grows."""
        assert [entry.undominated for entry in example_report.deltas] == [
            ["A1", "A2", "A4", "A5"],
            ["A1", "A5"],
            ["A1"],
        ]

    def test_maximal_sets(self, example_report):
        """Only delta_max singles out a maximal algorithm."""
        assert [entry.maximal for entry in example_report.deltas] == [[], [], ["A1"]]

    def test_a5_is_best_somewhere_at_delta_zero(self, example_workflow, relations):
        """Mostly weighting performance, A5 beats everyone when s1 is certain.

        u = 0.9 * performance + 0.1 * mean meets every constraint at delta = 0
        with every strict comparison strictly positive, so no algorithm can
        dominate A5 there.
        """
        workflow = example_workflow
        system = workflow.system
        coords = np.array([element.coords for element in system.elements])
        u = 0.9 * coords[:, 1] + 0.1 * coords.mean(axis=1)

        assert satisfies_nabla(system, u, 0.0) >= -1e-9
        assert np.min(system.nabla_rows.strict_matrix @ u) > 1e-6
        assert np.array_equal(workflow.credal.extreme_points[0], [1.0, 0.0, 0.0, 0.0, 0.0])

        acts = workflow.mtdp.acts(system.elements)
        first_state = np.array([u[act.outcome_index[0]] for act in acts])
        a5 = ALL_ACTIONS.index("A5")
        others = np.delete(first_state, a5)
        assert np.all(first_state[a5] > others)

        dominators = np.delete(relations["zero"].dominates[:, a5], a5)
        assert not dominators.any()

    def test_a1_dominates_a4_at_half_delta_max(self, relations):
        """The margin is far outside the optimality tolerance."""
        rel = relations["half"]
        a1, a4 = ALL_ACTIONS.index("A1"), ALL_ACTIONS.index("A4")

        assert rel.dominates[a1, a4]
        assert not rel.dominates[a4, a1]
        assert rel.opt_values[a1, a4] > 1e-3

    def test_auto_deltas(self, example_report):
        """Auto deltas are 0, half of delta_max and delta_max."""
        low, middle, high = (entry.delta for entry in example_report.deltas)

        assert low == 0.0
        assert 2 * middle == pytest.approx(high, abs=1e-11)
        assert high == pytest.approx(DELTA_MAX, abs=1e-9)

    def test_report_shape(self, example_report):
        """Each delta entry is consistent and carries a reflexive 6 x 6 matrix."""
        assert example_report.actions == ALL_ACTIONS
        assert example_report.num_cardinal == 2
        assert not example_report.positive_support
        for entry in example_report.deltas:
            assert entry.consistent
            assert len(entry.dominance) == 6
            assert all(entry.dominance[i][i] for i in range(6))

    def test_choice_sets_nest(self, example_report):
        """Maximal sets grow and undominated sets shrink with delta."""
        maximal = [set(entry.maximal) for entry in example_report.deltas]
        undominated = [set(entry.undominated) for entry in example_report.deltas]

        assert maximal[0] <= maximal[1] <= maximal[2]
        assert undominated[2] <= undominated[1] <= undominated[0]

    def test_hasse_at_delta_max(self, example_report):
        """A1 dominates every other action at delta_max, so it alone has no parent."""
        hasse = example_report.deltas[-1].hasse
        dominated = {target for _, target in hasse.edges}

        assert ["A1"] in hasse.classes
        assert "A1" not in dominated
        assert any(source == "A1" for source, _ in hasse.edges)


class TestDeltaMax:
    """The largest consistent granularity of the induced preference system."""

    def test_value(self, example_workflow):
        """delta_max is 1/27 and lies strictly inside (0, 1)."""
        bound = example_workflow.delta_bound

        assert bound.value == pytest.approx(DELTA_MAX, abs=1e-9)
        assert not bound.at_boundary
        assert bound.admissible == bound.value

    def test_feasible_at_delta_max_only(self, example_workflow, config):
        """The constraint set is nonempty at delta_max and empty just above it."""
        bound = example_workflow.delta_bound

        assert is_delta_consistent(example_workflow.system, bound.admissible, config)
        assert not is_delta_consistent(example_workflow.system, bound.value + 0.01, config)

    def test_reproducible(self, config):
        """A fresh workflow reproduces the pinned value."""
        again = DecisionWorkflow(load_example(), config)

        assert again.delta_bound.value == pytest.approx(DELTA_MAX, abs=1e-9)

    def test_explicit_delta_above_max_rejected(self, example_workflow):
        """The error carries the computed delta_max."""
        with pytest.raises(InconsistentPreferenceError) as info:
            example_workflow.resolve_deltas([0.0, DELTA_MAX + 0.05])
        assert info.value.delta_max == pytest.approx(DELTA_MAX, abs=1e-9)

    def test_analysed_delta_is_checked_for_consistency(self, example_workflow):
        """Entries carry the feasibility verdict; deltas above delta_max never get one."""
        entry = example_workflow.analyse(example_workflow.delta_bound.admissible)

        assert entry.consistent
        with pytest.raises(InconsistentPreferenceError):
            example_workflow.analyse(DELTA_MAX + 0.05)

    def test_duplicate_deltas_collapse(self, example_workflow):
        """Repeated deltas are analysed once."""
        assert example_workflow.resolve_deltas([0.0, 0.0]) == [0.0]


@pytest.mark.parametrize("name", AUTO_DELTAS)
class TestVerdicts:
    """LP verdicts against interior probabilities, witnesses and sampled utilities."""

    def test_extreme_points_bound_interior_probabilities(
        self, name, example_workflow, relations, config
    ):
        """No mixture of extreme points gives a smaller gap than the extreme points do."""
        workflow = example_workflow
        relation = relations[name]
        acts = list(relation.acts)
        points = workflow.credal.extreme_points
        rng = np.random.default_rng(11)
        for _ in range(100):
            i, j = rng.choice(len(acts), size=2, replace=False)
            probability = rng.dirichlet(np.ones(len(points))) @ points
            problem = expectation_gap_lp(
                workflow.system, relation.delta, acts[i], acts[j], probability
            )

            value = solve(problem, config).optimal_value
            assert value >= relation.opt_values[i, j] - config.optimality_tolerance

    def test_witnesses_refute_non_dominance(self, name, example_workflow, relations, config):
        """Every missing edge comes with an admissible utility and a losing probability."""
        workflow = example_workflow
        relation = relations[name]
        acts = list(relation.acts)
        checker = DominanceChecker(workflow.system, workflow.credal, relation.delta, config)
        for i, j in np.argwhere(~relation.dominates):
            verdict = checker.verdict(acts[i], acts[j])
            v = verdict.witness
            probability = workflow.credal.extreme_points[verdict.extreme_index]
            gap = probability @ (v[list(acts[i].outcome_index)] - v[list(acts[j].outcome_index)])

            assert gap < -config.optimality_tolerance
            assert satisfies_nabla(workflow.system, v, relation.delta) >= -1e-6

    @pytest.mark.slow
    def test_sampling_never_contradicts_lp(self, name, example_workflow, relations, config):
        """Ten thousand sampled utilities never refute an LP dominance verdict."""
        workflow = example_workflow
        relation = relations[name]
        samples = sample_utilities(
            workflow.system, relation.delta, 10_000, seed=2024, config=config
        )
        result = agreement(relation, workflow.system, workflow.credal, samples, config)

        assert result.agrees, result.contradictions
        assert result.contradicted == 0
