from contextlib import contextmanager

import numpy as np
import pytest

from fracab.schema import Problem


@contextmanager
def does_not_raise():
    yield


def constant_problem(value: float, y0: float = 0.0) -> Problem:
    return Problem(rhs=lambda t, y: np.full_like(y, value), y0=[y0])


def time_problem(source, y0: float = 0.0) -> Problem:
    return Problem(rhs=lambda t, y: np.array([source(t)]), y0=[y0])


@pytest.fixture(scope="function")
def rng() -> np.random.Generator:
    return np.random.default_rng(20230714)
