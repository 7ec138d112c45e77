import numpy as np
import pytest

from panelgranger import Panel, preset, simulate_panel


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def exp1_causal():
    return simulate_panel(preset("experiment1", seed=101))


@pytest.fixture(scope="session")
def exp1_null():
    return simulate_panel(preset("experiment1", causal=False, seed=101))


def random_panel(rng, n=5, t=40):
    return Panel(rng.standard_normal((n, t)), rng.standard_normal((n, t)))
