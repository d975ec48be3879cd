"""Shared fixtures for the mtdom test suite."""

import numpy as np
import pytest

from mtdom.config import SolverConfig
from mtdom.credal import StateSpace
from mtdom.mtdp import Mtdp
from mtdom.preferences import PreferenceSystem
from mtdom.storage import load_example
from mtdom.workflow import DecisionWorkflow


@pytest.fixture
def config():
    """Default tolerances, independent of the environment."""
    return SolverConfig()


@pytest.fixture
def chain3():
    """top > mid > bottom."""
    return PreferenceSystem.create(
        ("top", "mid", "bottom"), [(0, 1), (1, 2)], top=0, bottom=2, close=True
    )


@pytest.fixture
def make_mtdp():
    """Factory for small decision problems from nested lists."""

    def build(values, num_cardinal=None, actions=None):
        values = np.asarray(values, dtype=float)
        a, m, r = values.shape
        return Mtdp(
            space=StateSpace.numbered(m),
            actions=tuple(actions or (f"X{i + 1}" for i in range(a))),
            values=values,
            num_cardinal=r if num_cardinal is None else num_cardinal,
        )

    return build


@pytest.fixture
def random_mtdps():
    """50 seeded problems with up to 4 actions, 4 states and 3 targets on a coarse grid."""
    rng = np.random.default_rng(20240601)
    problems = []
    for k in range(50):
        a, m, r = rng.integers(2, 5), rng.integers(1, 5), rng.integers(1, 4)
        values = rng.integers(0, 11, size=(a, m, r)) / 10
        problems.append(
            Mtdp(
                space=StateSpace.numbered(int(m)),
                actions=tuple(f"X{i + 1}" for i in range(a)),
                values=values,
                num_cardinal=int(rng.integers(0, r + 1)),
            )
        )
    return problems


@pytest.fixture(scope="session")
def example_workflow():
    """The bundled algorithm comparison, analysed once per session."""
    return DecisionWorkflow(load_example(), SolverConfig())


@pytest.fixture(scope="session")
def example_report(example_workflow):
    return example_workflow.run()
