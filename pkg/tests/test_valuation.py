import numpy as np
import pytest

from confusion_profiler.core.data_models import ValuationClass, WeightScheme
from confusion_profiler.core.fixtures import FIXTURES
from confusion_profiler.core.matrix_core import ConfusionMatrix
from confusion_profiler.core.valuation import (
    batch_class_mask,
    correlation,
    is_standardized,
    kappa_profile,
    pair_class_check,
    standardize,
    standardized_correlation,
    weight_scheme,
    weighted_kappa,
)
from confusion_profiler.utils.error_handler import (
    DegenerateMatrixError,
    DegenerateValuationError,
    MatrixValidationError,
)

from conftest import random_confusion_matrix

C = ValuationClass


class TestCorrelation:
    def test_matches_direct_computation(self, cm0):
        f = np.array([0.0, 1.0, 3.0])
        g = np.array([2.0, -1.0, 0.5])
        row, col = cm0.row_marginals, cm0.col_marginals
        fc = f - row @ f
        gc = g - col @ g
        expected = (fc @ cm0.cells @ gc) / np.sqrt((row @ fc**2) * (col @ gc**2))
        assert correlation(cm0, f, g) == pytest.approx(expected, abs=1e-12)

    def test_affine_invariance(self, cm0):
        f = np.array([0.0, 1.0, 3.0])
        g = np.array([2.0, -1.0, 0.5])
        base = correlation(cm0, f, g)
        assert correlation(cm0, 2 * f + 3, 0.5 * g - 1) == pytest.approx(base, abs=1e-12)
        assert correlation(cm0, -f, g) == pytest.approx(-base, abs=1e-12)

    def test_perfect_agreement(self):
        diagonal = FIXTURES.matrix("DIAGONAL")
        assert correlation(diagonal, [1, 2, 5], [1, 2, 5]) == pytest.approx(1.0)

    def test_constant_valuation_is_degenerate(self, cm0):
        with pytest.raises(DegenerateValuationError):
            correlation(cm0, [1, 1, 1], [0, 1, 2])

    def test_length_mismatch(self, cm0):
        with pytest.raises(MatrixValidationError):
            correlation(cm0, [0, 1], [0, 1, 2])

    def test_standardize(self, cm0):
        f = standardize([3.0, 1.0, 7.0], cm0.row_marginals)
        assert is_standardized(f, cm0.row_marginals)
        g = standardize([0.0, 1.0, 1.0], cm0.col_marginals)
        assert standardized_correlation(cm0, f, g) == pytest.approx(
            correlation(cm0, [3.0, 1.0, 7.0], [0.0, 1.0, 1.0]), abs=1e-12)

    def test_standardize_constant_raises(self, cm0):
        with pytest.raises(DegenerateValuationError):
            standardize([2.0, 2.0, 2.0], cm0.row_marginals)


class TestClassMembership:
    @pytest.mark.parametrize("f, g, cls, expected", [
        ([0, 1, 2], [0, 0, 1], C.II, True),
        ([0, 1, 2], [2, 1, 1], C.II, False),
        ([0, 1, 2], [2, 1, 1], C.ID, True),
        ([2, 0, 1], [5, 1, 3], C.CO, True),
        ([2, 0, 1], [5, 1, 3], C.II, False),
        ([2, 0, 1], [1, 5, 3], C.ANTI, True),
        ([2, 0, 1], [1, 5, 3], C.CO, False),
        ([0, 1, 2], [2, 1, 1], C.MON, True),
        ([2, 0, 1], [1, 5, 3], C.COANTI, True),
        ([0, 2, 1], [0, 1, 2], C.COANTI, False),
        ([0, 2, 1], [0, 1, 2], C.SUP, True),
    ])
    def test_pair_class_check(self, f, g, cls, expected):
        assert pair_class_check(f, g, cls) is expected

    def test_mismatched_lengths(self):
        with pytest.raises(MatrixValidationError):
            pair_class_check([0, 1], [0, 1, 2], C.II)

    @pytest.mark.parametrize("cls", [C.SUP, C.II, C.ID, C.CO, C.ANTI])
    def test_batch_mask_agrees(self, cls, rng):
        # integer draws make ties (and so boundary cases) frequent
        F = rng.integers(0, 3, size=(400, 3)).astype(float)
        G = rng.integers(0, 3, size=(400, 3)).astype(float)
        mask = batch_class_mask(F, G, cls)
        assert list(mask) == [pair_class_check(f, g, cls) for f, g in zip(F, G)]


class TestWeightedKappa:
    def test_weight_schemes(self):
        np.testing.assert_array_equal(weight_scheme("indicator", 3), 1 - np.eye(3))
        np.testing.assert_array_equal(weight_scheme(WeightScheme.LINEAR, 3)[0], [0, 1, 2])
        np.testing.assert_array_equal(weight_scheme(WeightScheme.QUADRATIC, 3)[0], [0, 1, 4])

    def test_scores_needs_both_valuations(self):
        with pytest.raises(MatrixValidationError):
            weight_scheme(WeightScheme.SCORES, 3, f=[0, 1, 2])

    def test_hand_evaluated_indicator_kappa(self):
        matrix = ConfusionMatrix.from_array([[0.4, 0.1], [0.1, 0.4]])
        assert weighted_kappa(matrix, weight_scheme("indicator", 2)) == pytest.approx(0.6)

    @pytest.mark.parametrize("scheme", ["indicator", "linear", "quadratic"])
    def test_anchors(self, scheme):
        diagonal = FIXTURES.matrix("DIAGONAL")
        product = FIXTURES.matrix("PRODUCT")
        assert weighted_kappa(diagonal, weight_scheme(scheme, 3)) == pytest.approx(1.0)
        assert weighted_kappa(product, weight_scheme(scheme, 3)) == pytest.approx(0.0, abs=1e-9)

    def test_scores_kappa_equals_correlation(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 6))
            matrix = random_confusion_matrix(rng, d, sparsity=0.0)
            f = standardize(rng.standard_normal(d), matrix.row_marginals)
            g = standardize(rng.standard_normal(d), matrix.col_marginals)
            kappa = weighted_kappa(matrix, weight_scheme(WeightScheme.SCORES, d, f, g))
            assert kappa == pytest.approx(correlation(matrix, f, g), abs=1e-9)

    def test_zero_expected_disagreement(self):
        matrix = ConfusionMatrix.from_array([[1, 0], [0, 0]])
        with pytest.raises(DegenerateMatrixError):
            weighted_kappa(matrix, weight_scheme("indicator", 2))
        assert kappa_profile(matrix)[WeightScheme.INDICATOR] is None

    def test_weight_shape_checked(self, cm0):
        with pytest.raises(MatrixValidationError):
            weighted_kappa(cm0, np.ones((2, 2)))


class TestReferenceValues:
    def test_standardize_example(self):
        np.testing.assert_allclose(standardize([1, 2, 3], np.full(3, 1 / 3)),
                                   [-1.224745, 0.0, 1.224745], atol=1e-6)

    def test_standardize_is_idempotent(self, cm0):
        f = standardize([0.3, -1.0, 2.0], cm0.row_marginals)
        np.testing.assert_allclose(standardize(f, cm0.row_marginals), f, atol=1e-9)

    def test_published_sup_vectors(self, cm0):
        f = [-0.8164, -0.8164, 1.2247]
        g = [-1.1547, 1.7320, 0.0]
        assert correlation(cm0, f, g) == pytest.approx(0.7071, abs=1e-4)

    def test_correlation_is_bounded(self, rng):
        for _ in range(200):
            d = int(rng.integers(2, 6))
            matrix = random_confusion_matrix(rng, d, sparsity=0.0)
            assert abs(correlation(matrix, rng.standard_normal(d), rng.standard_normal(d))) <= 1 + 1e-12

    def test_scores_weights_on_ranks_are_quadratic(self):
        ranks = np.arange(1.0, 5.0)
        np.testing.assert_array_equal(weight_scheme(WeightScheme.SCORES, 4, ranks, ranks),
                                      weight_scheme(WeightScheme.QUADRATIC, 4))


def _brute_force_signs(f, g):
    products = [(f[i] - f[j]) * (g[i] - g[j]) for i in range(len(f)) for j in range(len(f))]
    return all(p >= 0 for p in products), all(p <= 0 for p in products)


def test_comonotone_checks_match_a_double_loop(rng):
    for _ in range(500):
        d = int(rng.integers(2, 5))
        f = rng.integers(0, 3, d).astype(float)
        g = rng.integers(0, 3, d).astype(float)
        co, anti = _brute_force_signs(f, g)
        assert pair_class_check(f, g, C.CO) is co
        assert pair_class_check(f, g, C.ANTI) is anti


def test_constant_valuation_is_both_comonotone_and_antimonotone():
    assert pair_class_check([1, 1, 1], [3, 0, 2], C.CO)
    assert pair_class_check([1, 1, 1], [3, 0, 2], C.ANTI)
