"""Tests for decision problems and the preference system they induce."""

import numpy as np
import pytest

from mtdom.credal import CredalSet, StateSpace, full_simplex, ordered_family, smoothed
from mtdom.dominance import maximal_set, undominated_set
from mtdom.exceptions import InputError
from mtdom.mtdp import (
    ONES,
    ZEROS,
    Mtdp,
    build_r1,
    build_r2,
    delta_dominance,
    eval_vectors,
    pareto_front,
    sub_system,
    uniformly_optimal,
)
from mtdom.preferences import check_preorder, max_delta, satisfies_nabla


def names(acts):
    return {act.name for act in acts}


def delta_grid(ps, config):
    admissible = max_delta(ps, config).admissible
    return [0.0, admissible / 2, admissible]


class TestMtdp:
    """Validation of decision problems."""

    def test_value_outside_unit_interval_is_located(self, make_mtdp):
        """The error names the action, state and target at fault."""
        with pytest.raises(InputError) as info:
            make_mtdp([[[0.5, 0.2]], [[0.3, 1.2]]])

        message = str(info.value)
        assert "'X2'" in message
        assert "'s1'" in message
        assert "'target2'" in message

    def test_num_cardinal_range(self, make_mtdp):
        """num_cardinal cannot exceed the number of targets."""
        with pytest.raises(InputError):
            make_mtdp([[[0.5]]], num_cardinal=2)

    def test_shape_mismatch(self):
        """Values must have one row per action and state."""
        with pytest.raises(InputError):
            Mtdp(StateSpace.numbered(2), ("X1",), np.zeros((1, 3, 1)), 1)

    def test_duplicate_action_names(self, make_mtdp):
        """Action names must be unique."""
        with pytest.raises(InputError):
            make_mtdp([[[0.5]], [[0.4]]], actions=["X", "X"])

    def test_values_are_read_only(self, make_mtdp):
        """The evaluation table cannot be modified in place."""
        m = make_mtdp([[[0.5]]])

        with pytest.raises(ValueError):
            m.values[0, 0, 0] = 0.1


class TestEvalVectors:
    def test_top_and_bottom_come_first(self, make_mtdp):
        """The ones vector is first and the zeros vector second."""
        m = make_mtdp([[[0.4, 0.6], [0.2, 0.2]], [[0.9, 0.1], [0.4, 0.6]]])
        vectors = eval_vectors(m)

        assert vectors[0].coords == (1.0, 1.0)
        assert vectors[0].synthetic == ONES
        assert vectors[1].coords == (0.0, 0.0)
        assert vectors[1].synthetic == ZEROS
        assert [v.coords for v in vectors[2:]] == [(0.4, 0.6), (0.2, 0.2), (0.9, 0.1)]

    def test_equal_vectors_merge_origins(self, make_mtdp):
        """Equal evaluations collapse into one vector keeping every origin."""
        m = make_mtdp([[[1.0, 1.0], [0.5, 0.2]], [[0.5, 0.2], [0.0, 0.0]]])
        vectors = eval_vectors(m)

        assert len(vectors) == 3
        assert vectors[0].origins == (("X1", "s1"),)
        assert vectors[1].origins == (("X2", "s2"),)
        assert vectors[2].label == "X1@s2/X2@s1"
        assert vectors[0].label == "ones"

    def test_acts_point_at_vectors(self, make_mtdp):
        """Acts map each state to the index of its evaluation vector."""
        m = make_mtdp([[[1.0, 1.0], [0.5, 0.2]], [[0.5, 0.2], [0.0, 0.0]]])
        acts = m.acts(eval_vectors(m))

        assert [act.outcome_index for act in acts] == [(0, 2), (2, 1)]


class TestInducedRelations:
    """R1 and R2 on evaluation vectors."""

    @pytest.fixture
    def line(self, make_mtdp):
        # vectors: 1.0, 0.0, 0.9, 0.1, 0.6, 0.4
        return make_mtdp([[[0.9], [0.1]], [[0.6], [0.4]]])

    def test_r1_is_componentwise(self, make_mtdp):
        """Vectors that trade off targets are incomparable."""
        m = make_mtdp([[[0.4, 0.6], [0.6, 0.4]]])
        vectors = eval_vectors(m)
        r1 = build_r1(vectors)

        assert (2, 3) not in r1
        assert (3, 2) not in r1
        assert {(0, 2), (0, 3), (2, 1), (3, 1)} <= r1
        check_preorder(r1)

    def test_cardinal_compares_differences(self, line):
        """Equal cardinal differences compare both ways."""
        vectors = eval_vectors(line)
        r1 = build_r1(vectors)
        r2 = build_r2(vectors, r1, num_cardinal=1)

        # 0.9 - 0.6 equals 0.4 - 0.1
        assert ((2, 4), (5, 3)) in r2
        assert ((5, 3), (2, 4)) in r2
        assert ((2, 3), (4, 5)) in r2

    def test_ordinal_compares_nesting(self, line):
        """On an ordinal target only nested exchanges compare."""
        vectors = eval_vectors(line)
        r1 = build_r1(vectors)
        r2 = build_r2(vectors, r1, num_cardinal=0)

        assert ((2, 3), (4, 5)) in r2
        assert ((4, 5), (2, 3)) not in r2
        # [0.6, 0.9] and [0.1, 0.4] are not nested
        assert ((2, 4), (5, 3)) not in r2

    def test_r2_stays_inside_r1(self, line):
        """R2 compares R1 pairs and is a preorder."""
        vectors = eval_vectors(line)
        r1 = build_r1(vectors)
        r2 = build_r2(vectors, r1, num_cardinal=1)

        assert all(first in r1 and second in r1 for first, second in r2)
        check_preorder(r2, name="R2", implicit_reflexive=True)

    def test_sub_system(self, line, config):
        """The induced system has the ones vector on top and the zeros vector at the bottom."""
        ps = sub_system(line, config=config)

        assert ps.top_index == 0
        assert ps.bottom_index == 1
        assert ps.size == 6
        assert sub_system(line, with_differences=False, config=config).r2 == frozenset()

    def test_mean_utility_represents_random_systems(self, random_mtdps, config):
        """The target mean satisfies every induced constraint."""
        for m in random_mtdps:
            ps = sub_system(m, config=config)
            mean = np.asarray([v.coords for v in ps.elements]).mean(axis=1)

            assert satisfies_nabla(ps, mean, 0.0) >= -config.feasibility_tolerance


class TestChoiceBaselines:
    """Uniformly optimal actions and the Pareto front."""

    def test_uniformly_optimal(self, make_mtdp):
        """An action best in every state and target is uniformly optimal."""
        m = make_mtdp([[[0.9, 0.8]], [[0.5, 0.8]], [[0.9, 0.8]]])

        assert uniformly_optimal(m) == ["X1", "X3"]
        assert pareto_front(m) == ["X1", "X3"]

    def test_trade_off_has_no_uniform_winner(self, make_mtdp):
        """Trading off targets leaves no uniformly optimal action."""
        m = make_mtdp([[[0.9, 0.1]], [[0.1, 0.9]], [[0.1, 0.1]]])

        assert uniformly_optimal(m) == []
        assert pareto_front(m) == ["X1", "X2"]

    def test_single_action(self, make_mtdp, config):
        """A single action is uniformly optimal, Pareto optimal and maximal."""
        m = make_mtdp([[[0.3], [0.7]]])
        rel = delta_dominance(m, ordered_family(m.space), 0.0, config)

        assert uniformly_optimal(m) == ["X1"]
        assert pareto_front(m) == ["X1"]
        assert names(maximal_set(rel)) == {"X1"}

    def test_credal_set_must_match_states(self, make_mtdp, config):
        """The credal set must live on the problem's states."""
        m = make_mtdp([[[0.3], [0.7]]])

        with pytest.raises(InputError):
            delta_dominance(m, ordered_family(StateSpace.numbered(3)), 0.0, config)


class TestChoiceSetProperties:
    """Nesting in delta and the relation to uno and par, on random problems."""

    def test_choice_sets_nest_in_delta(self, random_mtdps, config):
        """Maximal sets grow and undominated sets shrink with delta."""
        for m in random_mtdps:
            ps = sub_system(m, config=config)
            cs = ordered_family(m.space)
            relations = [delta_dominance(m, cs, d, config, ps=ps) for d in delta_grid(ps, config)]
            maximal = [names(maximal_set(rel)) for rel in relations]
            undominated = [names(undominated_set(rel)) for rel in relations]

            for low in range(3):
                for high in range(low, 3):
                    assert maximal[low] <= maximal[high], m.values
                    assert undominated[high] <= undominated[low], m.values

    def test_uniformly_optimal_actions_are_maximal(self, random_mtdps, config):
        """Uniformly optimal actions are maximal for every credal set and delta."""
        for m in random_mtdps:
            ps = sub_system(m, config=config)
            uno = set(uniformly_optimal(m))
            for cs in (ordered_family(m.space), full_simplex(m.space)):
                for d in delta_grid(ps, config)[::2]:
                    rel = delta_dominance(m, cs, d, config, ps=ps)

                    assert uno <= names(maximal_set(rel)), m.values

    def test_undominated_actions_are_pareto_optimal(self, random_mtdps, config):
        """With every state charged, undominated actions lie on the Pareto front."""
        for m in random_mtdps:
            ps = sub_system(m, config=config)
            cs = smoothed(ordered_family(m.space), 0.1)
            par = set(pareto_front(m))
            for d in delta_grid(ps, config):
                rel = delta_dominance(m, cs, d, config, ps=ps)

                assert names(undominated_set(rel)) <= par, m.values

    def test_equality_without_differences(self, random_mtdps, config):
        """No R2, delta = 0 and every distribution: max is uno and und is par."""
        for m in random_mtdps:
            ps = sub_system(m, with_differences=False, config=config)
            rel = delta_dominance(m, full_simplex(m.space), 0.0, config, ps=ps)

            assert names(maximal_set(rel)) == set(uniformly_optimal(m)), m.values
            assert names(undominated_set(rel)) == set(pareto_front(m)), m.values

    def test_relabelling_permutes_outputs(self, random_mtdps, config):
        """Permuting actions and states permutes the relation and keeps every choice set."""
        rng = np.random.default_rng(5)
        for m in random_mtdps[:20]:
            actions = rng.permutation(len(m.actions))
            states = rng.permutation(m.space.size)
            relabelled = Mtdp(
                space=StateSpace(tuple(m.space.states[s] for s in states)),
                actions=tuple(m.actions[a] for a in actions),
                values=m.values[actions][:, states],
                num_cardinal=m.num_cardinal,
            )
            cs = ordered_family(m.space)
            moved = CredalSet(relabelled.space, (), cs.extreme_points[:, states])
            ps = sub_system(m, config=config)
            delta = max_delta(ps, config).admissible / 2
            rel = delta_dominance(m, cs, delta, config, ps=ps)
            moved_rel = delta_dominance(relabelled, moved, delta, config)

            assert np.array_equal(moved_rel.dominates, rel.dominates[np.ix_(actions, actions)])
            assert names(maximal_set(moved_rel)) == names(maximal_set(rel)), m.values
            assert names(undominated_set(moved_rel)) == names(undominated_set(rel)), m.values
            assert set(uniformly_optimal(relabelled)) == set(uniformly_optimal(m))
            assert set(pareto_front(relabelled)) == set(pareto_front(m))
