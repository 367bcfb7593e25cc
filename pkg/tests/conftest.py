import numpy as np
import pytest

from plcontrol import fixtures


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def D1():
    return fixtures.d1()


@pytest.fixture
def D2():
    return fixtures.d2()


@pytest.fixture
def BD2():
    return fixtures.bd2()


@pytest.fixture
def CONE_BD2():
    return fixtures.cone_bd2()


@pytest.fixture
def SPHERE2():
    return fixtures.sphere2()


@pytest.fixture
def MAP_COLLAPSE():
    return fixtures.map_collapse()


@pytest.fixture
def MAP_BAD():
    return fixtures.map_bad()


@pytest.fixture
def PROJ():
    return fixtures.proj_map()
