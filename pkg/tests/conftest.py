import numpy as np
import pytest

import carrollgeo as cg


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def schwarzschild():
    # 2 GM = 1: unit-radius horizon sphere
    return cg.load("schwarzschild", GM=0.5, verify=False)


@pytest.fixture(scope="session")
def flat2():
    return cg.load("flat", n=2, verify=False)


@pytest.fixture(scope="session")
def lightcone():
    return cg.load("lightcone", verify=False)


@pytest.fixture(scope="session")
def thakurta():
    return cg.load("thakurta", GM=0.5, U="t", verify=False)


@pytest.fixture(scope="session")
def moebius():
    return cg.load("moebius", verify=False)


@pytest.fixture(scope="session")
def sphere():
    return cg.load("sphere_pullback", verify=False)
