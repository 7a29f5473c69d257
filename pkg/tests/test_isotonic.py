from itertools import combinations

import numpy as np
import pytest

from confusion_profiler.core.isotonic import pava, pava_decreasing
from confusion_profiler.utils.error_handler import MatrixValidationError


def brute_force_isotonic(y, w):
    """Best fit over all partitions into consecutive blocks with nondecreasing block means."""
    n = len(y)
    best_fit, best_loss = None, np.inf
    for k in range(n):
        for cuts in combinations(range(1, n), k):
            bounds = (0,) + cuts + (n,)
            fit = np.empty(n)
            means = []
            for start, stop in zip(bounds[:-1], bounds[1:]):
                mean = np.average(y[start:stop], weights=w[start:stop])
                fit[start:stop] = mean
                means.append(mean)
            if np.all(np.diff(means) >= 0):
                loss = float(np.sum(w * (y - fit) ** 2))
                if loss < best_loss:
                    best_fit, best_loss = fit, loss
    return best_fit


def test_pools_violators():
    fit = pava([1.0, 3.0, 2.0, 4.0], [1.0, 1.0, 1.0, 1.0])
    np.testing.assert_allclose(fit.fitted, [1.0, 2.5, 2.5, 4.0])
    assert fit.blocks == ((0, 1), (1, 3), (3, 4))


def test_monotone_input_is_unchanged():
    y = np.array([-1.0, 0.0, 0.5, 2.0])
    fit = pava(y, np.full(4, 0.25))
    np.testing.assert_array_equal(fit.fitted, y)
    assert len(fit.blocks) == 4


def test_weights_shift_pooled_mean():
    fit = pava([2.0, 0.0], [3.0, 1.0])
    np.testing.assert_allclose(fit.fitted, [1.5, 1.5])


def test_matches_brute_force(rng):
    for _ in range(60):
        n = int(rng.integers(2, 7))
        y = rng.standard_normal(n)
        w = rng.uniform(0.05, 1.0, n)
        fit = pava(y, w)
        np.testing.assert_allclose(fit.fitted, brute_force_isotonic(y, w), atol=1e-9)
        assert np.all(np.diff(fit.fitted) >= 0)


def test_blocks_cover_all_indices(rng):
    y = rng.standard_normal(8)
    fit = pava(y, np.ones(8))
    assert fit.blocks[0][0] == 0
    assert fit.blocks[-1][1] == 8
    for (_, stop), (start, _) in zip(fit.blocks[:-1], fit.blocks[1:]):
        assert stop == start
    for start, stop in fit.blocks:
        assert np.ptp(fit.fitted[start:stop]) == pytest.approx(0.0, abs=1e-12)


def test_decreasing_fit(rng):
    y = rng.standard_normal(6)
    w = rng.uniform(0.1, 1.0, 6)
    fit = pava_decreasing(y, w)
    assert np.all(np.diff(fit.fitted) <= 0)
    np.testing.assert_allclose(fit.fitted, -pava(-y, w).fitted)


@pytest.mark.parametrize("y, w", [
    ([1.0, 2.0], [1.0]),
    ([1.0, 2.0], [1.0, 0.0]),
    ([1.0, np.inf], [1.0, 1.0]),
])
def test_invalid_inputs(y, w):
    with pytest.raises(MatrixValidationError):
        pava(y, w)


def test_weighted_three_point_example():
    y, w = np.array([3.0, 1.0, 2.0]), np.array([1.0, 2.0, 1.0])
    np.testing.assert_allclose(pava(y, w).fitted, brute_force_isotonic(y, w), atol=1e-12)
    np.testing.assert_allclose(pava(y, w).fitted, [5 / 3, 5 / 3, 2.0])


def test_idempotent_and_block_residuals_vanish(rng):
    for _ in range(20):
        y = rng.standard_normal(6)
        w = rng.uniform(0.1, 1.0, 6)
        fit = pava(y, w)
        np.testing.assert_allclose(pava(fit.fitted, w).fitted, fit.fitted, atol=1e-12)
        for start, stop in fit.blocks:
            residual = w[start:stop] @ (y[start:stop] - fit.fitted[start:stop])
            assert residual == pytest.approx(0.0, abs=1e-12)
