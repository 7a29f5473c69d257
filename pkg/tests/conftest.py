"""
Shared fixtures for the Confusion Profiler test suite.
"""

from functools import lru_cache

import numpy as np
import pytest

from confusion_profiler.config.config_loader import SolverOptions
from confusion_profiler.core.coefficients import full_profile
from confusion_profiler.core.data_models import CoefficientProfile
from confusion_profiler.core.fixtures import FIXTURES
from confusion_profiler.core.matrix_core import ConfusionMatrix

FAST_OPTS = SolverOptions(restarts=16, screen_restarts=4, refine_top=2)


@lru_cache(maxsize=None)
def _fixture_profile(name: str) -> CoefficientProfile:
    return full_profile(FIXTURES.matrix(name), SolverOptions())


def random_confusion_matrix(rng: np.random.Generator, d: int, sparsity: float = 0.3) -> ConfusionMatrix:
    """Dirichlet cells with some entries zeroed; at least two rows and columns keep mass."""
    while True:
        cells = rng.dirichlet(np.ones(d * d)).reshape(d, d)
        cells[rng.random((d, d)) < sparsity] = 0.0
        if cells.sum() == 0:
            continue
        if (cells.sum(axis=1) > 0).sum() >= 2 and (cells.sum(axis=0) > 0).sum() >= 2:
            return ConfusionMatrix.from_array(cells)


@pytest.fixture(scope="session")
def fixture_profile():
    """Profile of a built-in fixture with default options, computed once per session."""
    return _fixture_profile


@pytest.fixture
def fast_opts() -> SolverOptions:
    return FAST_OPTS


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def cm0() -> ConfusionMatrix:
    return FIXTURES.matrix("CM0")
