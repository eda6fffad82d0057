import numpy as np
import pytest

from tailrisk import DistSpec, ReturnSeries, sample


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def student_returns():
    return ReturnSeries.from_values(sample(DistSpec("student_t", {"dof": 4, "scale": 0.6}), 3000, 11), label="T4")
