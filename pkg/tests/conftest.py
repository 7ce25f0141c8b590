import numpy as np
import pytest

from cgbell import all_fixtures, chsh, i3322, i3422_1, i3422_2, i3422_3


@pytest.fixture(scope="session")
def fixtures():
    return all_fixtures()


@pytest.fixture
def chsh_table():
    return chsh()


@pytest.fixture
def i3322_table():
    return i3322()


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)
