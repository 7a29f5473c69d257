"""
Maximization of the correlation C(f, g) over feasible valuation sets.

SUP is solved exactly from a singular value decomposition of the centred
ratio matrix. II and ID use alternating conditional maximization: for a
fixed row valuation the best column valuation in a cone is the normalized
cone projection of the conditional mean scores (isotonic regression for the
monotone cones), and symmetrically for the rows. A seeded multi-start driver
keeps the best pair.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from numpy.typing import NDArray
from scipy.linalg import null_space
from threadpoolctl import threadpool_limits

from .data_models import CoefficientReport, Route, ValuationClass, Valuation
from .isotonic import pava, pava_decreasing
from .matrix_core import ConfusionMatrix, collapse_null_classes, expand_valuation, reverse_columns
from .valuation import pair_class_check, standardize, weighted_moments
from ..config.config_loader import SolverOptions
from ..utils.error_handler import ConfigurationError, InvariantViolationError
from ..utils.logger import get_logger

PROJECTION_FLOOR = 1e-24
MONOTONE_SLACK = 1e-9

logger = get_logger(__name__)


def centered_steps(weights: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    Standardized step valuations 1{i >= k}, k = 1..m-1, one per row.

    These generate the cone of standardized nondecreasing valuations.
    """
    tails = np.cumsum(weights[::-1])[::-1][1:]
    index = np.arange(len(weights))
    steps = (index[None, :] >= np.arange(1, len(weights))[:, None]).astype(np.float64)
    spread = np.sqrt(np.maximum(tails * (1.0 - tails), PROJECTION_FLOOR))
    return (steps - tails[:, None]) / spread[:, None]


class ValuationCone(ABC):
    """A cone of valuations, closed under adding constants."""

    name = "cone"

    @abstractmethod
    def contains(self, v: Valuation) -> bool:
        """Exact membership test."""

    @abstractmethod
    def project(self, b: NDArray[np.float64], weights: NDArray[np.float64]) -> NDArray[np.float64]:
        """Weighted least-squares projection of ``b`` onto the cone."""

    @abstractmethod
    def rays(self, weights: NDArray[np.float64]) -> NDArray[np.float64]:
        """Standardized generators of the cone (rows)."""

    def maximize(self, b: NDArray[np.float64], weights: NDArray[np.float64],
                 fallback: Optional[Valuation] = None) -> Valuation:
        """
        Standardized valuation v in the cone maximizing sum_i w_i b_i v_i.

        The normalized projection of ``b`` is optimal when it is nonzero.
        Otherwise the optimum is a standardized generator. The previous
        iterate, when given, is also a candidate so that the objective
        never decreases.

        Args:
            b: Conditional mean scores
            weights: Positive marginal probabilities
            fallback: Previous iterate

        Returns:
            Standardized valuation in the cone
        """
        candidates: List[Valuation] = []
        projection = self.project(b, weights)
        mean, variance = weighted_moments(projection, weights)
        if variance > PROJECTION_FLOOR:
            candidates.append((projection - mean) / np.sqrt(variance))
        if fallback is not None:
            candidates.append(fallback)
        candidates.extend(self.rays(weights))

        stacked = np.vstack(candidates)
        scores = stacked @ (weights * b)
        return stacked[int(np.argmax(scores))].copy()


class FreeCone(ValuationCone):
    """All valuations."""

    name = "free"

    def contains(self, v: Valuation) -> bool:
        return True

    def project(self, b, weights):
        return np.asarray(b, dtype=np.float64)

    def rays(self, weights):
        return centered_steps(weights)


class MonotoneCone(ValuationCone):
    """Nondecreasing (``increasing=True``) or nonincreasing valuations."""

    def __init__(self, increasing: bool = True):
        self.increasing = increasing
        self.name = "increasing" if increasing else "decreasing"

    def contains(self, v: Valuation) -> bool:
        steps = np.diff(v)
        return bool(np.all(steps >= 0) if self.increasing else np.all(steps <= 0))

    def project(self, b, weights):
        if self.increasing:
            return pava(b, weights).fitted
        return pava_decreasing(b, weights).fitted

    def rays(self, weights):
        steps = centered_steps(weights)
        return steps if self.increasing else -steps


@dataclass(frozen=True)
class FeasibleSet:
    """
    Product of a row cone and a column cone.

    Attributes:
        valuation_class: Class whose predicate every member satisfies
        row_cone: Cone of row valuations f
        col_cone: Cone of column valuations g
    """
    valuation_class: ValuationClass
    row_cone: ValuationCone
    col_cone: ValuationCone

    @classmethod
    def for_class(cls, valuation_class: ValuationClass) -> "FeasibleSet":
        if valuation_class == ValuationClass.SUP:
            return cls(valuation_class, FreeCone(), FreeCone())
        if valuation_class == ValuationClass.II:
            return cls(valuation_class, MonotoneCone(True), MonotoneCone(True))
        if valuation_class == ValuationClass.ID:
            return cls(valuation_class, MonotoneCone(True), MonotoneCone(False))
        raise ConfigurationError(
            f"No product-cone feasible set for {valuation_class.value}; "
            "CO and ANTI are solved by permutation search"
        )


@dataclass(frozen=True)
class StartResult:
    value: float
    f: Valuation
    g: Valuation
    iterations: int
    converged: bool


def _run_start(cells: NDArray[np.float64], row: NDArray[np.float64], col: NDArray[np.float64],
               feasible_set: FeasibleSet, max_iterations: int, convergence_tol: float,
               f_start: Valuation) -> StartResult:
    """Alternating conditional maximization from one starting row valuation."""
    row_cone, col_cone = feasible_set.row_cone, feasible_set.col_cone
    f = f_start
    g = col_cone.maximize(cells.T @ f / col, col)
    value = float(f @ cells @ g)

    for iteration in range(1, max_iterations + 1):
        f_next = row_cone.maximize(cells @ g / row, row, f)
        g_next = col_cone.maximize(cells.T @ f_next / col, col, g)
        value_next = float(f_next @ cells @ g_next)

        if value_next < value - MONOTONE_SLACK:
            raise InvariantViolationError(
                "Alternating update decreased the objective",
                before=value, after=value_next, iteration=iteration,
            )
        improvement = value_next - value
        if improvement > 0:
            f, g, value = f_next, g_next, value_next
        if improvement < convergence_tol:
            return StartResult(value, f, g, iteration, True)

    return StartResult(value, f, g, max_iterations, False)


def initial_valuations(row_cone: ValuationCone, weights: NDArray[np.float64],
                       opts: SolverOptions) -> List[Valuation]:
    """
    Starting row valuations: step valuations first, then seeded Gaussian draws.

    Each Gaussian draw gets its own child stream of ``SeedSequence(opts.seed)``
    so start k is the same whatever the total number of starts.
    """
    starts: List[Valuation] = []
    if opts.include_step_starts:
        starts.extend(row.copy() for row in centered_steps(weights))
    for child in np.random.SeedSequence(opts.seed).spawn(opts.restarts):
        draw = np.random.default_rng(child).standard_normal(len(weights))
        starts.append(row_cone.maximize(draw, weights))
    return starts


def multi_start_generic(matrix: ConfusionMatrix, feasible_set: FeasibleSet,
                        opts: Optional[SolverOptions] = None) -> CoefficientReport:
    """
    Best correlation over a product-cone feasible set from many starts.

    Zero-marginal classes are removed before solving and filled back in
    afterwards with the value of the nearest kept class.

    Args:
        matrix: Confusion matrix
        feasible_set: Row and column cones
        opts: Solver options

    Returns:
        CoefficientReport with route ``alternating``

    Raises:
        DegenerateMatrixError: If fewer than 2 rows or columns carry mass
        InvariantViolationError: If an update decreases the objective or the
            optimum leaves the feasible set
    """
    opts = opts or SolverOptions()
    collapsed, class_map = collapse_null_classes(matrix)
    cells = np.asarray(collapsed.cells)
    row = np.asarray(collapsed.row_marginals)
    col = np.asarray(collapsed.col_marginals)

    starts = initial_valuations(feasible_set.row_cone, row, opts)
    run = partial(_run_start, cells, row, col, feasible_set, opts.max_iterations, opts.convergence_tol)
    if opts.n_jobs == 1:
        results = [run(start) for start in starts]
    else:
        with threadpool_limits(limits=1):
            results = Parallel(n_jobs=opts.n_jobs)(delayed(run)(start) for start in starts)

    best = results[0]
    for result in results[1:]:
        if result.value > best.value:
            best = result

    f_opt = expand_valuation(best.f, class_map.kept_rows, class_map.d)
    g_opt = expand_valuation(best.g, class_map.kept_cols, class_map.d)
    if not pair_class_check(f_opt, g_opt, feasible_set.valuation_class):
        raise InvariantViolationError("Reported optimum is outside its valuation class",
                                      valuation_class=feasible_set.valuation_class.value)

    logger.debug(f"{feasible_set.valuation_class.value} solve finished",
                 value=f"{best.value:.8f}", starts=len(starts),
                 iterations=sum(r.iterations for r in results))
    return CoefficientReport(
        value=float(np.clip(best.value, -1.0, 1.0)),
        f_opt=f_opt,
        g_opt=g_opt,
        valuation_class=feasible_set.valuation_class,
        route=Route.ALTERNATING,
        starts_used=len(starts),
        iterations_total=sum(r.iterations for r in results),
        converged=best.converged,
    )


def sup_correlation(matrix: ConfusionMatrix) -> CoefficientReport:
    """
    Maximal correlation from the spectrum of Q_ij = p_ij / sqrt(p_i. p_.j).

    The top singular value of Q restricted to the complements of the
    square-root marginals is the second singular value of Q. Its singular
    vectors divided by the square-root marginals are standardized optimal
    valuations.

    Raises:
        DegenerateMatrixError: If fewer than 2 rows or columns carry mass
    """
    collapsed, class_map = collapse_null_classes(matrix)
    cells = np.asarray(collapsed.cells)
    root_row = np.sqrt(collapsed.row_marginals)
    root_col = np.sqrt(collapsed.col_marginals)

    ratio = cells / np.outer(root_row, root_col)
    row_basis = null_space(root_row[None, :])
    col_basis = null_space(root_col[None, :])
    u, singular, vt = np.linalg.svd(row_basis.T @ ratio @ col_basis)

    f = row_basis @ u[:, 0] / root_row
    g = col_basis @ vt[0] / root_col
    lead = int(np.argmax(np.abs(f)))
    if f[lead] < 0:
        f, g = -f, -g
    f = standardize(f, collapsed.row_marginals)
    g = standardize(g, collapsed.col_marginals)

    return CoefficientReport(
        value=float(np.clip(singular[0], 0.0, 1.0)),
        f_opt=expand_valuation(f, class_map.kept_rows, class_map.d),
        g_opt=expand_valuation(g, class_map.kept_cols, class_map.d),
        valuation_class=ValuationClass.SUP,
        route=Route.SPECTRAL,
        starts_used=1,
    )


def optimize_monotone(matrix: ConfusionMatrix, direction: ValuationClass,
                      opts: Optional[SolverOptions] = None) -> CoefficientReport:
    """
    II or ID coefficient by alternating isotonic maximization.

    ID is II of the column-reversed matrix with the column valuation
    reversed back.

    Args:
        matrix: Confusion matrix
        direction: ValuationClass.II or ValuationClass.ID
        opts: Solver options

    Returns:
        CoefficientReport for the requested class
    """
    if direction == ValuationClass.II:
        return multi_start_generic(matrix, FeasibleSet.for_class(ValuationClass.II), opts)
    if direction != ValuationClass.ID:
        raise ConfigurationError(f"optimize_monotone needs II or ID, got {direction.value}")

    report = multi_start_generic(reverse_columns(matrix), FeasibleSet.for_class(ValuationClass.II), opts)
    g_opt = report.g_opt[::-1].copy()
    if not pair_class_check(report.f_opt, g_opt, ValuationClass.ID):
        raise InvariantViolationError("Reversed II optimum is not an ID pair")
    return CoefficientReport(
        value=report.value,
        f_opt=report.f_opt,
        g_opt=g_opt,
        valuation_class=ValuationClass.ID,
        route=report.route,
        starts_used=report.starts_used,
        iterations_total=report.iterations_total,
        converged=report.converged,
    )


def solve_batch(matrices: Sequence[ConfusionMatrix], direction: ValuationClass,
                opts: SolverOptions, n_jobs: int = 1) -> List[CoefficientReport]:
    """
    ``optimize_monotone`` over many matrices, results in input order.

    Used by the permutation search; every solve itself runs sequentially.
    """
    if n_jobs == 1 or len(matrices) < 2:
        return [optimize_monotone(m, direction, opts) for m in matrices]
    with threadpool_limits(limits=1):
        return list(Parallel(n_jobs=n_jobs)(
            delayed(optimize_monotone)(m, direction, opts) for m in matrices
        ))
