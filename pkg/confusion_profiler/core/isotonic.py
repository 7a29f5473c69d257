"""
Weighted isotonic regression used as the monotone-cone projection.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import isotonic_regression

from ..utils.error_handler import MatrixValidationError


@dataclass(frozen=True)
class IsotonicFit:
    """
    Weighted least-squares nondecreasing fit.

    Attributes:
        fitted: Nondecreasing fitted values
        blocks: Half-open (start, stop) index ranges pooled to a common value
    """
    fitted: NDArray[np.float64]
    blocks: Tuple[Tuple[int, int], ...]


def _validated(y: ArrayLike, w: ArrayLike) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if y.ndim != 1 or y.shape != w.shape:
        raise MatrixValidationError("Values and weights must be vectors of equal length",
                                    values=y.shape, weights=w.shape)
    if not np.all(np.isfinite(y)) or not np.all(np.isfinite(w)):
        raise MatrixValidationError("Values and weights must be finite")
    if np.any(w <= 0):
        raise MatrixValidationError("Isotonic regression needs positive weights",
                                    min_weight=float(w.min()))
    return y, w


def pava(y: ArrayLike, w: ArrayLike) -> IsotonicFit:
    """
    Pool-adjacent-violators fit of ``y`` with weights ``w``.

    Minimizes sum_i w_i (y_i - x_i)^2 over nondecreasing x.

    Args:
        y: Values to fit
        w: Positive weights

    Returns:
        IsotonicFit with the fitted vector and its pooled blocks

    Raises:
        MatrixValidationError: On length mismatch or a nonpositive weight
    """
    y, w = _validated(y, w)
    result = isotonic_regression(y, weights=w, increasing=True)
    starts = [int(b) for b in result.blocks]
    blocks = tuple((start, stop) for start, stop in zip(starts[:-1], starts[1:]))
    # pooled means are computed per block; force exact monotonicity across blocks
    fitted = np.maximum.accumulate(np.asarray(result.x, dtype=np.float64))
    return IsotonicFit(fitted=fitted, blocks=blocks)


def pava_decreasing(y: ArrayLike, w: ArrayLike) -> IsotonicFit:
    """Nonincreasing fit, obtained by fitting -y and negating the result."""
    fit = pava(-np.asarray(y, dtype=np.float64), w)
    return IsotonicFit(fitted=-fit.fitted, blocks=fit.blocks)
