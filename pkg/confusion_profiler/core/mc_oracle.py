"""
Monte Carlo rejection estimator of a functional correlation coefficient.

Pairs of independent standard Gaussian valuations are drawn, pairs outside
the valuation class are rejected and the largest correlation among the
accepted pairs is a lower bound of the coefficient. Used as an independent
sanity check of the solvers.
"""

import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed
from numpy.typing import NDArray
from tqdm import tqdm

from .data_models import McEstimate, ValuationClass
from .matrix_core import ConfusionMatrix, collapse_null_classes
from .valuation import VARIANCE_FLOOR, batch_class_mask
from ..config.config_loader import McOptions
from ..utils.error_handler import SamplingBudgetError
from ..utils.logger import get_logger

SAMPLED_CLASSES = (
    ValuationClass.SUP,
    ValuationClass.II,
    ValuationClass.ID,
    ValuationClass.CO,
    ValuationClass.ANTI,
)
COMPOUND_CLASSES = {
    ValuationClass.MON: (ValuationClass.II, ValuationClass.ID),
    ValuationClass.COANTI: (ValuationClass.CO, ValuationClass.ANTI),
}

logger = get_logger(__name__)


@dataclass(frozen=True)
class _WorkerResult:
    best: float
    accepted: int
    draws: int


def _split(total: int, parts: int) -> List[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if k < extra else 0) for k in range(parts)]


def _standardized_rows(values: NDArray[np.float64], weights: NDArray[np.float64]) -> NDArray[np.float64]:
    centered = values - (values @ weights)[:, None]
    variance = (centered ** 2) @ weights
    return centered / np.sqrt(np.maximum(variance, VARIANCE_FLOOR))[:, None]


def _sample_worker(cells: NDArray[np.float64], row: NDArray[np.float64], col: NDArray[np.float64],
                   valuation_class: ValuationClass, target: int, max_draws: int, batch_size: int,
                   seed: np.random.SeedSequence, show_progress: bool) -> _WorkerResult:
    """Draw batches from one substream until ``target`` pairs are accepted."""
    rng = np.random.default_rng(seed)
    d = cells.shape[0]
    best = -np.inf
    accepted = 0
    draws = 0

    with tqdm(total=target, disable=not show_progress, file=sys.stderr,
              desc=f"MC {valuation_class.value}", unit="pair") as progress:
        while accepted < target:
            if draws >= max_draws:
                break
            size = min(batch_size, max_draws - draws)
            F = rng.standard_normal((size, d))
            G = rng.standard_normal((size, d))
            # membership is invariant under the positive affine standardization
            hits = np.flatnonzero(batch_class_mask(F, G, valuation_class))
            needed = target - accepted
            if len(hits) >= needed:
                hits = hits[:needed]
                draws += int(hits[-1]) + 1
            else:
                draws += size
            if len(hits) == 0:
                continue

            F_acc = _standardized_rows(F[hits], row)
            G_acc = _standardized_rows(G[hits], col)
            values = np.einsum("bi,ij,bj->b", F_acc, cells, G_acc)
            best = max(best, float(values.max()))
            accepted += len(hits)
            progress.update(len(hits))

    return _WorkerResult(best=best, accepted=accepted, draws=draws)


def _estimate_sampled(matrix: ConfusionMatrix, valuation_class: ValuationClass,
                      opts: McOptions) -> McEstimate:
    cells = np.asarray(matrix.cells)
    row = np.asarray(matrix.row_marginals)
    col = np.asarray(matrix.col_marginals)
    seeds = np.random.SeedSequence(opts.seed).spawn(opts.n_workers)
    targets = _split(opts.accepted_samples, opts.n_workers)
    budgets = _split(opts.max_draws, opts.n_workers)

    worker_args = [
        (cells, row, col, valuation_class, target, budget, opts.batch_size, seed,
         opts.progress and k == 0)
        for k, (target, budget, seed) in enumerate(zip(targets, budgets, seeds))
    ]
    if opts.n_workers == 1:
        results = [_sample_worker(*args) for args in worker_args]
    else:
        results = Parallel(n_jobs=opts.n_workers)(
            delayed(_sample_worker)(*args) for args in worker_args
        )

    accepted = sum(r.accepted for r in results)
    draws = sum(r.draws for r in results)
    if accepted < opts.accepted_samples:
        raise SamplingBudgetError(
            f"Draw budget exhausted before {opts.accepted_samples} {valuation_class.value} pairs were accepted",
            accepted=accepted,
            draws=draws,
            acceptance_rate=f"{accepted / draws:.3g}" if draws else "0",
        )

    estimate = McEstimate(
        value=float(min(max(r.best for r in results), 1.0)),
        valuation_class=valuation_class,
        accepted=accepted,
        draws=draws,
    )
    logger.debug(f"MC {valuation_class.value} estimate {estimate.value:.6f}",
                 accepted=accepted, draws=draws,
                 acceptance_rate=f"{estimate.acceptance_rate:.4g}")
    return estimate


def mc_estimate(matrix: ConfusionMatrix, valuation_class: ValuationClass,
                opts: Optional[McOptions] = None) -> McEstimate:
    """
    Rejection-sampling lower bound of a coefficient.

    For a fixed seed, batch size and worker count the accepted pairs form a
    fixed sequence, so the estimate never decreases as ``accepted_samples``
    grows. MON and COANTI are the larger of their two component estimates.

    Args:
        matrix: Confusion matrix
        valuation_class: Any of the seven classes
        opts: Sampling options

    Returns:
        McEstimate with the bound, accepted and drawn pair counts

    Raises:
        DegenerateMatrixError: If fewer than 2 rows or columns carry mass
        SamplingBudgetError: If ``max_draws`` is reached first
    """
    opts = opts or McOptions()
    # sampling stays on the full index space; this only rejects degenerate input
    collapse_null_classes(matrix)
    if valuation_class in COMPOUND_CLASSES:
        parts = [_estimate_sampled(matrix, component, opts)
                 for component in COMPOUND_CLASSES[valuation_class]]
        return McEstimate(
            value=max(part.value for part in parts),
            valuation_class=valuation_class,
            accepted=sum(part.accepted for part in parts),
            draws=sum(part.draws for part in parts),
        )
    return _estimate_sampled(matrix, valuation_class, opts)
