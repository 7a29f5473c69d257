"""
Flowchart comparison of two confusion matrices.

Steps are examined in order (CO, ANTI, II, ID by default). At each step the
coefficients of the two matrices are compared with a tie tolerance; the first
step that separates them decides. Larger is better for SUP, II, MON, CO and
COANTI, smaller is better for ID and ANTI.
"""

from typing import Dict, Optional, Tuple

from .coefficients import compute_coefficient
from .data_models import CoefficientProfile, Outcome, ValuationClass, Verdict
from .matrix_core import ConfusionMatrix
from ..config.config_loader import ComparatorConfig, SolverOptions
from ..utils.logger import get_logger

LOWER_IS_BETTER = frozenset({ValuationClass.ANTI, ValuationClass.ID})

logger = get_logger(__name__)


def step_outcome(step: ValuationClass, first: float, second: float, epsilon: float) -> Optional[Outcome]:
    """
    Outcome decided at one step, or None on a tie.

    Args:
        step: Coefficient compared at this step
        first: Value for the first matrix
        second: Value for the second matrix
        epsilon: Values closer than this are tied
    """
    if step in LOWER_IS_BETTER:
        first, second = second, first
    if first < second - epsilon:
        return Outcome.FIRST_INFERIOR
    if second < first - epsilon:
        return Outcome.FIRST_SUPERIOR
    return None


def _decide(values: Dict[ValuationClass, Tuple[float, float]], config: ComparatorConfig) -> Verdict:
    for step in config.order:
        first, second = values[step]
        outcome = step_outcome(step, first, second, config.epsilon)
        if outcome is not None:
            logger.debug(f"Decided at {step.value}: {first:.6f} vs {second:.6f}", outcome=outcome.value)
            return Verdict(outcome, step, values, list(config.order), config.epsilon)
    logger.debug("All comparison steps tied")
    return Verdict(Outcome.INCOMPARABLE, None, values, list(config.order), config.epsilon)


def compare_profiles(first: CoefficientProfile, second: CoefficientProfile,
                     config: Optional[ComparatorConfig] = None) -> Verdict:
    """
    Verdict from two precomputed profiles.

    The verdict carries the value pairs of every step in the order.
    """
    config = config or ComparatorConfig()
    values = {step: (first.value(step), second.value(step)) for step in config.order}
    return _decide(values, config)


def compare(first: ConfusionMatrix, second: ConfusionMatrix,
            config: Optional[ComparatorConfig] = None,
            opts: Optional[SolverOptions] = None) -> Verdict:
    """
    Compare two confusion matrices with the flowchart.

    Only the classes named in the step order are computed.

    Args:
        first: First confusion matrix (M)
        second: Second confusion matrix (N)
        config: Tie tolerance and step order
        opts: Solver options

    Returns:
        Verdict: FirstInferior, FirstSuperior or Incomparable with the deciding step
    """
    config = config or ComparatorConfig()
    opts = opts or SolverOptions()
    values = {}
    for step in config.order:
        values[step] = (compute_coefficient(first, step, opts).value,
                        compute_coefficient(second, step, opts).value)
    return _decide(values, config)
