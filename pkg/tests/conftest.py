import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from thatstream import warm_up
from thatstream.pmu import generate_dataset

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")


@pytest.fixture(scope="session", autouse=True)
def _compiled():
    warm_up()


@pytest.fixture(scope="session")
def dataset():
    """The four default signatures for seed 0."""
    return generate_dataset(seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
