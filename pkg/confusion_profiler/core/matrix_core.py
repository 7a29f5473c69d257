"""
Confusion matrix ingestion, validation and index transformations.

A ConfusionMatrix is the joint probability mass of two classifiers over the
same d ordinal classes. Inputs given as counts or as probabilities are
normalized by their grand total; the raw deficit is kept for reporting.
"""

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Tuple, Union

import jsonschema
import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray

from .data_models import ClassMap
from ..utils.error_handler import DegenerateMatrixError, MatrixValidationError
from ..utils.logger import get_logger

CELL_TOL = 1e-12

MATRIX_DOCUMENT_SCHEMA = {
    "type": "object",
    "required": ["cells"],
    "properties": {
        "cells": {
            "type": "array",
            "minItems": 2,
            "items": {"type": "array", "items": {"type": "number"}},
        },
        "labels": {"type": "array", "items": {"type": "string"}},
    },
}

logger = get_logger(__name__)


def _read_only(values: ArrayLike) -> NDArray[np.float64]:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """
    Validated joint probability mass p_ij of two classifications.

    Build instances with ``ConfusionMatrix.from_array`` (or ``parse_matrix``);
    the constructor itself only checks that ``cells`` already is a
    probability mass.

    Attributes:
        cells: d x d array of probabilities, read-only
        mass_deficit: |raw grand total - 1| of the input before normalization
        labels: Optional class names, one per class
        row_marginals: p_i. (derived)
        col_marginals: p_.j (derived)
    """
    cells: NDArray[np.float64]
    mass_deficit: float = 0.0
    labels: Optional[Tuple[str, ...]] = None
    row_marginals: NDArray[np.float64] = field(init=False, repr=False)
    col_marginals: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self):
        cells = _read_only(self.cells)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            raise MatrixValidationError("Confusion matrix must be square", shape=cells.shape)
        if cells.shape[0] < 2:
            raise MatrixValidationError("Confusion matrix needs at least 2 classes", d=cells.shape[0])
        if not np.all(np.isfinite(cells)) or np.any(cells < 0):
            raise MatrixValidationError("Cells must be finite and nonnegative")
        if abs(cells.sum() - 1.0) > CELL_TOL:
            raise MatrixValidationError("Cells must sum to 1", total=float(cells.sum()))
        if self.labels is not None and len(self.labels) != cells.shape[0]:
            raise MatrixValidationError("Expected one label per class",
                                        labels=len(self.labels), d=cells.shape[0])

        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "row_marginals", _read_only(cells.sum(axis=1)))
        object.__setattr__(self, "col_marginals", _read_only(cells.sum(axis=0)))

    @classmethod
    def from_array(cls, raw: ArrayLike, labels: Optional[Sequence[str]] = None) -> "ConfusionMatrix":
        """
        Validate a square array of counts or probabilities and normalize it.

        Args:
            raw: Square array of nonnegative finite numbers
            labels: Optional class names

        Returns:
            ConfusionMatrix whose cells sum to 1

        Raises:
            MatrixValidationError: If the array is not square, has d < 2,
                holds a negative or non-finite entry or is all zero
        """
        try:
            values = np.asarray(raw, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise MatrixValidationError(f"Matrix entries must be numbers in a rectangular array: {e}") from None

        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise MatrixValidationError("Confusion matrix must be square", shape=values.shape)
        if values.shape[0] < 2:
            raise MatrixValidationError("Confusion matrix needs at least 2 classes", d=values.shape[0])
        if not np.all(np.isfinite(values)):
            raise MatrixValidationError("Matrix holds a non-finite entry")
        if np.any(values < 0):
            row, col = np.argwhere(values < 0)[0]
            raise MatrixValidationError("Matrix holds a negative entry", row=int(row), col=int(col))

        total = float(values.sum())
        if total <= 0:
            raise MatrixValidationError("Matrix is all zero")

        return cls(
            cells=values / total,
            mass_deficit=abs(total - 1.0),
            labels=tuple(labels) if labels is not None else None,
        )

    @property
    def d(self) -> int:
        return self.cells.shape[0]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "cells": self.cells.tolist(),
            "labels": list(self.labels) if self.labels is not None else None,
            "mass_deficit": self.mass_deficit,
        }


def _parse_json_document(text: str) -> ConfusionMatrix:
    try:
        document: Any = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixValidationError(f"Invalid JSON matrix document: {e}") from None

    if isinstance(document, list):
        document = {"cells": document}

    try:
        jsonschema.validate(document, MATRIX_DOCUMENT_SCHEMA)
    except jsonschema.ValidationError as e:
        raise MatrixValidationError(f"JSON matrix document rejected: {e.message}") from None

    return ConfusionMatrix.from_array(document["cells"], labels=document.get("labels"))


def _parse_csv_document(text: str) -> ConfusionMatrix:
    try:
        frame = pd.read_csv(io.StringIO(text), header=None, skipinitialspace=True,
                            skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise MatrixValidationError("Matrix document is empty") from None
    except pd.errors.ParserError as e:
        raise MatrixValidationError(f"Rows of unequal length in CSV matrix: {e}") from None

    if frame.isna().to_numpy().any():
        raise MatrixValidationError("CSV matrix has a missing cell")
    try:
        values = frame.apply(pd.to_numeric, errors="raise").to_numpy(dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise MatrixValidationError(f"CSV matrix holds a non-numeric cell: {e}") from None

    return ConfusionMatrix.from_array(values)


def parse_matrix(text: str) -> ConfusionMatrix:
    """
    Parse a CSV or JSON matrix document.

    CSV: one row per line, comma-separated, no header.
    JSON: ``{"cells": [[...], ...], "labels": [...]}`` (labels optional) or a bare array.
    Counts and probabilities are both accepted.

    Args:
        text: Document text

    Returns:
        ConfusionMatrix normalized by the grand total
    """
    stripped = text.strip()
    if not stripped:
        raise MatrixValidationError("Matrix document is empty")
    if stripped[0] in "{[":
        matrix = _parse_json_document(stripped)
    else:
        matrix = _parse_csv_document(stripped)

    if matrix.mass_deficit > CELL_TOL:
        logger.debug("Normalized matrix by its grand total", mass_deficit=f"{matrix.mass_deficit:.6g}")
    return matrix


def load_matrix(path: Union[str, Path]) -> ConfusionMatrix:
    """
    Read and parse a matrix file.

    Raises:
        OSError: If the file cannot be read
        MatrixValidationError: If the content is not a valid matrix
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    logger.debug(f"Loaded matrix document {path}", bytes=len(text))
    return parse_matrix(text)


def marginals(matrix: ConfusionMatrix) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Row marginals p_i. and column marginals p_.j."""
    return matrix.row_marginals, matrix.col_marginals


def _derived(matrix: ConfusionMatrix, cells: NDArray[np.float64],
             labels: Optional[Tuple[str, ...]]) -> ConfusionMatrix:
    return ConfusionMatrix(cells=cells, mass_deficit=matrix.mass_deficit, labels=labels)


def reverse_columns(matrix: ConfusionMatrix) -> ConfusionMatrix:
    """Matrix with column order reversed: cell'(i, j) = cell(i, d-1-j). An involution."""
    return _derived(matrix, matrix.cells[:, ::-1], matrix.labels)


def validate_permutation(perm: Sequence[int], d: int) -> Tuple[int, ...]:
    """
    Check that ``perm`` is a bijection on {0, ..., d-1}.

    Raises:
        MatrixValidationError: If it is not
    """
    try:
        values = tuple(int(p) for p in perm)
    except (TypeError, ValueError):
        raise MatrixValidationError("Permutation entries must be integers") from None
    if sorted(values) != list(range(d)):
        raise MatrixValidationError("Not a permutation of the class indices", perm=values, d=d)
    return values


def permute_jointly(matrix: ConfusionMatrix, perm: Sequence[int]) -> ConfusionMatrix:
    """
    Relabel the classes of both classifiers with the same permutation.

    Args:
        matrix: Confusion matrix
        perm: 0-based permutation; new class a is old class perm[a]

    Returns:
        Matrix with cell'(a, b) = cell(perm[a], perm[b])
    """
    order = np.array(validate_permutation(perm, matrix.d))
    labels = tuple(matrix.labels[i] for i in order) if matrix.labels is not None else None
    return _derived(matrix, matrix.cells[np.ix_(order, order)], labels)


@dataclass(frozen=True, eq=False)
class CollapsedMatrix:
    """
    Positive-marginal restriction of a confusion matrix.

    Rows and columns may differ in number when different classes were
    dropped, so this is a rectangular joint mass rather than a
    ConfusionMatrix. It exposes the same ``cells``/marginal interface the
    solvers use.
    """
    cells: NDArray[np.float64]
    class_map: ClassMap
    row_marginals: NDArray[np.float64] = field(init=False, repr=False)
    col_marginals: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self):
        cells = _read_only(self.cells)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "row_marginals", _read_only(cells.sum(axis=1)))
        object.__setattr__(self, "col_marginals", _read_only(cells.sum(axis=0)))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.cells.shape


JointMass = Union[ConfusionMatrix, CollapsedMatrix]


def collapse_null_classes(matrix: ConfusionMatrix) -> Tuple["JointMass", ClassMap]:
    """
    Remove rows and columns whose marginal is zero.

    Args:
        matrix: Confusion matrix

    Returns:
        Tuple of the restricted matrix and the ClassMap describing the removal

    Raises:
        DegenerateMatrixError: If fewer than 2 rows or 2 columns carry mass
    """
    row, col = marginals(matrix)
    kept_rows = np.flatnonzero(row > CELL_TOL)
    kept_cols = np.flatnonzero(col > CELL_TOL)
    if len(kept_rows) < 2 or len(kept_cols) < 2:
        raise DegenerateMatrixError(
            "Every coefficient is undefined: fewer than 2 classes carry mass",
            rows_with_mass=len(kept_rows),
            cols_with_mass=len(kept_cols),
        )

    class_map = ClassMap(
        d=matrix.d,
        kept_rows=tuple(int(i) for i in kept_rows),
        kept_cols=tuple(int(j) for j in kept_cols),
        dropped_rows=tuple(int(i) for i in np.flatnonzero(row <= CELL_TOL)),
        dropped_cols=tuple(int(j) for j in np.flatnonzero(col <= CELL_TOL)),
    )
    if class_map.is_identity:
        return matrix, class_map

    cells = matrix.cells[np.ix_(kept_rows, kept_cols)]
    cells = cells / cells.sum()
    collapsed: JointMass
    if len(kept_rows) == len(kept_cols):
        labels = None
        if matrix.labels is not None and class_map.is_symmetric:
            labels = tuple(matrix.labels[i] for i in kept_rows)
        collapsed = ConfusionMatrix(cells=cells, mass_deficit=matrix.mass_deficit, labels=labels)
    else:
        # different numbers of rows and columns survive
        collapsed = CollapsedMatrix(cells=cells, class_map=class_map)
    logger.debug("Collapsed zero-marginal classes",
                 dropped_rows=list(class_map.dropped_rows),
                 dropped_cols=list(class_map.dropped_cols))
    return collapsed, class_map


def expand_valuation(values: ArrayLike, kept: Sequence[int], d: int) -> NDArray[np.float64]:
    """
    Re-expand a valuation on kept classes to all d classes.

    Each dropped class takes the value of the nearest kept class; when two
    kept classes are equally near, the lower index wins. Monotone valuations
    stay monotone.
    """
    values = np.asarray(values, dtype=np.float64)
    kept_idx = np.asarray(kept)
    if len(kept_idx) == d:
        return values.copy()

    expanded = np.empty(d, dtype=np.float64)
    expanded[kept_idx] = values
    kept_set = set(int(k) for k in kept_idx)
    for i in range(d):
        if i in kept_set:
            continue
        distances = np.abs(kept_idx - i)
        # argmin returns the first minimum, i.e. the lower kept index on ties
        expanded[i] = values[int(np.argmin(distances))]
    return expanded
