"""
Category-score valuations and the functionals evaluated on them.

Covers standardization against a marginal, the correlation C(f, g) of two
valuations under a joint mass, membership tests for the valuation classes
and the weighted kappa family.
"""

from typing import Dict, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .data_models import (
    BUILTIN_WEIGHT_SCHEMES,
    ValuationClass,
    Valuation,
    WeightMatrix,
    WeightScheme,
)
from .matrix_core import JointMass
from ..utils.error_handler import (
    DegenerateMatrixError,
    DegenerateValuationError,
    MatrixValidationError,
)

VARIANCE_FLOOR = 1e-12
KAPPA_FLOOR = 1e-12


def as_valuation(values: ArrayLike, d: Optional[int] = None) -> Valuation:
    """
    Convert to a finite float vector, optionally checking its length.

    Raises:
        MatrixValidationError: On wrong shape or non-finite entries
    """
    try:
        vector = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError):
        raise MatrixValidationError("Valuation entries must be numbers") from None
    if vector.ndim != 1:
        raise MatrixValidationError("Valuation must be a vector", shape=vector.shape)
    if d is not None and vector.shape[0] != d:
        raise MatrixValidationError("Valuation length does not match class count",
                                    length=vector.shape[0], d=d)
    if not np.all(np.isfinite(vector)):
        raise MatrixValidationError("Valuation holds a non-finite entry")
    return vector


def weighted_moments(f: Valuation, weights: NDArray[np.float64]) -> tuple:
    """Weighted mean and weighted variance of ``f``."""
    mean = float(weights @ f)
    variance = float(weights @ (f - mean) ** 2)
    return mean, variance


def standardize(f: ArrayLike, weights: ArrayLike) -> Valuation:
    """
    Map a valuation affinely to weighted mean 0 and weighted second moment 1.

    Args:
        f: Valuation
        weights: Marginal probabilities (nonnegative, summing to 1)

    Returns:
        Standardized valuation; order among positive-weight entries is kept

    Raises:
        DegenerateValuationError: If the weighted variance is <= 1e-12
    """
    weights = np.asarray(weights, dtype=np.float64)
    f = as_valuation(f, len(weights))
    mean, variance = weighted_moments(f, weights)
    if variance <= VARIANCE_FLOOR:
        raise DegenerateValuationError("Valuation has zero weighted variance", variance=variance)
    return (f - mean) / np.sqrt(variance)


def is_standardized(f: Valuation, weights: NDArray[np.float64], tol: float = 1e-9) -> bool:
    mean = float(weights @ f)
    second = float(weights @ f ** 2)
    return abs(mean) <= tol and abs(second - 1.0) <= tol


def correlation(matrix: JointMass, f: ArrayLike, g: ArrayLike) -> float:
    """
    Pearson correlation of f(X) and g(Y) under the joint mass of ``matrix``.

    Args:
        matrix: Joint mass p_ij
        f: Row valuation
        g: Column valuation

    Returns:
        C(f, g) in [-1, 1]

    Raises:
        DegenerateValuationError: If f or g has zero weighted variance
    """
    rows, cols = matrix.cells.shape
    f = as_valuation(f, rows)
    g = as_valuation(g, cols)
    mean_f, var_f = weighted_moments(f, matrix.row_marginals)
    mean_g, var_g = weighted_moments(g, matrix.col_marginals)
    if var_f <= VARIANCE_FLOOR or var_g <= VARIANCE_FLOOR:
        raise DegenerateValuationError("Correlation undefined for a constant valuation",
                                       var_f=var_f, var_g=var_g)
    covariance = float((f - mean_f) @ matrix.cells @ (g - mean_g))
    return float(np.clip(covariance / np.sqrt(var_f * var_g), -1.0, 1.0))


def standardized_correlation(matrix: JointMass, f: Valuation, g: Valuation) -> float:
    """sum_ij f_i p_ij g_j, equal to C(f, g) for a standardized pair."""
    return float(f @ matrix.cells @ g)


def _is_nondecreasing(v: Valuation) -> bool:
    return bool(np.all(np.diff(v) >= 0))


def _is_nonincreasing(v: Valuation) -> bool:
    return bool(np.all(np.diff(v) <= 0))


def _pairwise_signs(f: Valuation, g: Valuation) -> NDArray[np.float64]:
    return (f[:, None] - f[None, :]) * (g[:, None] - g[None, :])


def pair_class_check(f: ArrayLike, g: ArrayLike, valuation_class: ValuationClass) -> bool:
    """
    Exact membership test of a valuation pair in a valuation class.

    II: both nondecreasing. ID: f nondecreasing and g nonincreasing.
    CO: (f_i - f_j)(g_i - g_j) >= 0 for all i, j. ANTI: the same product <= 0.
    SUP: always. MON and COANTI: union of their two component classes.
    No tolerance is applied.

    Raises:
        MatrixValidationError: If f and g differ in length
    """
    f = as_valuation(f)
    g = as_valuation(g)
    if f.shape != g.shape:
        raise MatrixValidationError("Valuations differ in length", f=len(f), g=len(g))

    if valuation_class == ValuationClass.SUP:
        return True
    if valuation_class == ValuationClass.II:
        return _is_nondecreasing(f) and _is_nondecreasing(g)
    if valuation_class == ValuationClass.ID:
        return _is_nondecreasing(f) and _is_nonincreasing(g)
    if valuation_class == ValuationClass.CO:
        return bool(np.all(_pairwise_signs(f, g) >= 0))
    if valuation_class == ValuationClass.ANTI:
        return bool(np.all(_pairwise_signs(f, g) <= 0))
    if valuation_class == ValuationClass.MON:
        return (pair_class_check(f, g, ValuationClass.II)
                or pair_class_check(f, g, ValuationClass.ID))
    if valuation_class == ValuationClass.COANTI:
        return (pair_class_check(f, g, ValuationClass.CO)
                or pair_class_check(f, g, ValuationClass.ANTI))
    raise MatrixValidationError(f"Unknown valuation class {valuation_class}")


def batch_class_mask(F: NDArray[np.float64], G: NDArray[np.float64],
                     valuation_class: ValuationClass) -> NDArray[np.bool_]:
    """
    Row-wise ``pair_class_check`` for stacks of valuation pairs.

    Args:
        F: (n, d) row valuations
        G: (n, d) column valuations
        valuation_class: Class to test

    Returns:
        Boolean vector of length n
    """
    if valuation_class == ValuationClass.SUP:
        return np.ones(F.shape[0], dtype=bool)
    if valuation_class in (ValuationClass.II, ValuationClass.ID):
        f_up = np.all(np.diff(F, axis=1) >= 0, axis=1)
        if valuation_class == ValuationClass.II:
            return f_up & np.all(np.diff(G, axis=1) >= 0, axis=1)
        return f_up & np.all(np.diff(G, axis=1) <= 0, axis=1)
    if valuation_class in (ValuationClass.CO, ValuationClass.ANTI):
        products = (F[:, :, None] - F[:, None, :]) * (G[:, :, None] - G[:, None, :])
        products = products.reshape(F.shape[0], -1)
        if valuation_class == ValuationClass.CO:
            return np.all(products >= 0, axis=1)
        return np.all(products <= 0, axis=1)
    raise MatrixValidationError(f"No batch membership test for {valuation_class.value}")


def weight_scheme(kind: Union[WeightScheme, str], d: int,
                  f: Optional[Sequence[float]] = None,
                  g: Optional[Sequence[float]] = None) -> WeightMatrix:
    """
    Disagreement weights w_ij for weighted kappa.

    Classes are numbered from 1, so linear weights are |i - j| and
    quadratic weights (i - j)^2. The ``scores`` scheme uses (f_i - g_j)^2
    and needs both valuations.

    Args:
        kind: indicator, linear, quadratic or scores
        d: Class count
        f: Row scores for the scores scheme
        g: Column scores for the scores scheme

    Returns:
        d x d nonnegative weight matrix
    """
    kind = WeightScheme(kind)
    if d < 2:
        raise MatrixValidationError("Weight schemes need d >= 2", d=d)

    index = np.arange(1, d + 1, dtype=np.float64)
    gap = index[:, None] - index[None, :]
    if kind == WeightScheme.INDICATOR:
        return (gap != 0).astype(np.float64)
    if kind == WeightScheme.LINEAR:
        return np.abs(gap)
    if kind == WeightScheme.QUADRATIC:
        return gap ** 2

    if f is None or g is None:
        raise MatrixValidationError("The scores weight scheme needs both valuations")
    f = as_valuation(f, d)
    g = as_valuation(g, d)
    return (f[:, None] - g[None, :]) ** 2


def weighted_kappa(matrix: JointMass, weights: ArrayLike) -> float:
    """
    Weighted kappa: 1 - sum w_ij p_ij / sum w_ij p_i. p_.j

    Raises:
        MatrixValidationError: If the weight matrix has the wrong shape or a negative entry
        DegenerateMatrixError: If the expected disagreement is (numerically) zero
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != matrix.cells.shape:
        raise MatrixValidationError("Weight matrix shape does not match the confusion matrix",
                                    weights=weights.shape, matrix=matrix.cells.shape)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise MatrixValidationError("Disagreement weights must be finite and nonnegative")

    expected = float(matrix.row_marginals @ weights @ matrix.col_marginals)
    if expected <= KAPPA_FLOOR:
        raise DegenerateMatrixError("Weighted kappa undefined: zero expected disagreement",
                                    expected=expected)
    observed = float(np.sum(weights * matrix.cells))
    return 1.0 - observed / expected


def kappa_profile(matrix: JointMass) -> Dict[WeightScheme, Optional[float]]:
    """Weighted kappa for every built-in scheme; None where it is undefined."""
    kappas: Dict[WeightScheme, Optional[float]] = {}
    for scheme in BUILTIN_WEIGHT_SCHEMES:
        try:
            kappas[scheme] = weighted_kappa(matrix, weight_scheme(scheme, matrix.cells.shape[0]))
        except DegenerateMatrixError:
            kappas[scheme] = None
    return kappas
