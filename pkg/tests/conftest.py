import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from weiljet.algebra import make_truncated_algebra

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def dual():
    return make_truncated_algebra(1, 1)


@pytest.fixture(scope="session")
def t3():
    return make_truncated_algebra(1, 2)


@pytest.fixture(scope="session")
def t4():
    return make_truncated_algebra(1, 3)


@pytest.fixture(scope="session")
def m2():
    return make_truncated_algebra(2, 1)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
