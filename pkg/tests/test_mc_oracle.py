from math import factorial

import numpy as np
import pytest

from confusion_profiler.config.config_loader import McOptions, SolverOptions
from confusion_profiler.core.coefficients import compute_coefficient
from confusion_profiler.core.data_models import ValuationClass
from confusion_profiler.core.fixtures import FIXTURES
from confusion_profiler.core.matrix_core import ConfusionMatrix
from confusion_profiler.core.mc_oracle import mc_estimate
from confusion_profiler.utils.error_handler import DegenerateMatrixError, SamplingBudgetError

from conftest import random_confusion_matrix

C = ValuationClass
SLACK = 1e-6


def test_sup_estimate_is_a_close_lower_bound(cm0, fixture_profile):
    exact = fixture_profile("CM0").value(C.SUP)
    estimate = mc_estimate(cm0, C.SUP, McOptions(accepted_samples=10**5))
    assert estimate.value <= exact + SLACK
    assert exact - estimate.value <= 0.03
    assert estimate.accepted == 10**5
    assert estimate.draws == 10**5
    assert estimate.acceptance_rate == pytest.approx(1.0)


def test_increasing_estimate_on_diagonal():
    diagonal = FIXTURES.matrix("DIAGONAL")
    estimate = mc_estimate(diagonal, C.II, McOptions(accepted_samples=20000))
    assert estimate.value <= 1.0 + SLACK
    assert 1.0 - estimate.value <= 0.02
    assert estimate.draws > estimate.accepted


def test_estimate_grows_with_the_sample(cm0):
    values = [mc_estimate(cm0, C.CO, McOptions(accepted_samples=n, batch_size=512)).value
              for n in (100, 1000, 10000)]
    assert values == sorted(values)


def test_deterministic_for_a_seed(cm0):
    opts = McOptions(accepted_samples=5000, seed=7)
    assert mc_estimate(cm0, C.ANTI, opts) == mc_estimate(cm0, C.ANTI, opts)


def test_seed_changes_the_stream(cm0):
    first = mc_estimate(cm0, C.SUP, McOptions(accepted_samples=2000, seed=1))
    second = mc_estimate(cm0, C.SUP, McOptions(accepted_samples=2000, seed=2))
    assert first.value != second.value


def test_budget_exhaustion_raises():
    matrix = FIXTURES.matrix("CM(A)")
    with pytest.raises(SamplingBudgetError):
        mc_estimate(matrix, C.II, McOptions(accepted_samples=1000, max_draws=1000))


def test_compound_classes_take_the_larger_component(cm0):
    opts = McOptions(accepted_samples=3000)
    ii = mc_estimate(cm0, C.II, opts)
    id_ = mc_estimate(cm0, C.ID, opts)
    mon = mc_estimate(cm0, C.MON, opts)
    assert mon.value == max(ii.value, id_.value)
    assert mon.accepted == ii.accepted + id_.accepted
    assert mon.valuation_class == C.MON


def test_parallel_workers(cm0, fixture_profile):
    estimate = mc_estimate(cm0, C.SUP, McOptions(accepted_samples=4000, n_workers=2))
    assert estimate.accepted == 4000
    assert estimate.value <= fixture_profile("CM0").value(C.SUP) + SLACK


@pytest.mark.parametrize("cls", [C.SUP, C.II, C.ID, C.CO, C.ANTI])
def test_never_exceeds_the_solver(cls, rng):
    matrix = random_confusion_matrix(rng, 3, sparsity=0.0)
    exact = compute_coefficient(matrix, cls, SolverOptions()).value
    estimate = mc_estimate(matrix, cls, McOptions(accepted_samples=5000))
    assert estimate.value <= exact + SLACK
    assert np.isfinite(estimate.value)


def test_anti_estimate_on_cm0(cm0):
    estimate = mc_estimate(cm0, C.ANTI, McOptions(accepted_samples=10**5))
    assert estimate.value <= 0.6123 + 1e-3
    assert 0.6123 - estimate.value <= 0.05


@pytest.mark.parametrize("d", [2, 3])
def test_increasing_acceptance_rate(d):
    # membership does not depend on the matrix, only on the class count
    matrix = ConfusionMatrix.from_array(np.eye(d))
    estimate = mc_estimate(matrix, C.II, McOptions(accepted_samples=20000))
    rate = (1 / factorial(d)) ** 2
    standard_error = np.sqrt(rate * (1 - rate) / estimate.draws)
    assert abs(estimate.acceptance_rate - rate) <= 3 * standard_error


@pytest.mark.parametrize("cells", [[[1.0, 0.0], [0.0, 0.0]], [[0.5, 0.5], [0.0, 0.0]],
                                   [[0.3, 0.0, 0.0], [0.7, 0.0, 0.0], [0.0, 0.0, 0.0]]])
@pytest.mark.parametrize("cls", [C.SUP, C.II, C.MON])
def test_degenerate_matrix_raises(cells, cls):
    matrix = ConfusionMatrix.from_array(np.array(cells))
    with pytest.raises(DegenerateMatrixError):
        mc_estimate(matrix, cls, McOptions(accepted_samples=100))
