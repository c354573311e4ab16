import os
import sys

import numpy as np
import pytest

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "Peakon_Sim")
sys.path.insert(0, os.path.join(ROOT, "lib"))
sys.path.append(ROOT)

from state import PeakonState  # noqa: E402

SCENARIOS = os.path.join(ROOT, "scenarios")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long eps sweeps and full-length regularized runs")


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def fig1a():
    return PeakonState.from_positions(0.0, [-2.0, -1.0, 0.0], [15.0, 2.0, 3.0])


@pytest.fixture
def fig1b():
    return PeakonState.from_positions(0.0, [-1.0, 0.0, 1.0], [5.0, 5.0, -1.0])


@pytest.fixture
def scenario_path():
    def path(name):
        return os.path.join(SCENARIOS, name + ".toml")

    return path


@pytest.fixture
def random_state():
    def make(rng, n_min=2, n_max=10, bound=5.0, spread=5.0):
        n = int(rng.integers(n_min, n_max + 1))
        x = np.sort(rng.uniform(-spread, spread, n))
        return PeakonState.from_positions(0.0, x, rng.uniform(-bound, bound, n))

    return make
