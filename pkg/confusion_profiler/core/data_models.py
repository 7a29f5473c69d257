"""
Core data models and enums for the Confusion Profiler.

This module defines the data structures used throughout a profiling run:
valuation classes, solver routes, coefficient reports, profiles and
comparison verdicts.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from ..utils.error_handler import InvariantViolationError

Valuation = NDArray[np.float64]
WeightMatrix = NDArray[np.float64]


class ValuationClass(Enum):
    """Feasible sets of valuation pairs, one per functional correlation coefficient."""
    SUP = "SUP"
    II = "II"
    ID = "ID"
    MON = "MON"
    CO = "CO"
    ANTI = "ANTI"
    COANTI = "COANTI"

    @classmethod
    def parse(cls, name: str) -> "ValuationClass":
        try:
            return cls(name.strip().upper())
        except ValueError:
            valid = ", ".join(member.value for member in cls)
            raise ValueError(f"Unknown valuation class '{name}'. Expected one of: {valid}") from None


PROFILE_ORDER: Tuple[ValuationClass, ...] = (
    ValuationClass.II,
    ValuationClass.ID,
    ValuationClass.CO,
    ValuationClass.ANTI,
    ValuationClass.SUP,
    ValuationClass.MON,
    ValuationClass.COANTI,
)


class Route(Enum):
    """How a coefficient value was obtained."""
    SPECTRAL = "spectral"
    ALTERNATING = "alternating"
    PERMUTATION_SEARCH = "permutation-search"
    PERMUTATION_HEURISTIC = "permutation-search(heuristic)"


class Outcome(Enum):
    """Result of comparing a first confusion matrix with a second one."""
    FIRST_INFERIOR = "FirstInferior"
    FIRST_SUPERIOR = "FirstSuperior"
    INCOMPARABLE = "Incomparable"


class WeightScheme(Enum):
    """Built-in disagreement weight schemes for weighted kappa."""
    INDICATOR = "indicator"
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    SCORES = "scores"


BUILTIN_WEIGHT_SCHEMES: Tuple[WeightScheme, ...] = (
    WeightScheme.INDICATOR,
    WeightScheme.LINEAR,
    WeightScheme.QUADRATIC,
)


@dataclass(frozen=True)
class ClassMap:
    """
    Bookkeeping for classes removed because their marginal is zero.

    Attributes:
        d: Class count of the original matrix
        kept_rows: Original row indices retained (ascending)
        kept_cols: Original column indices retained (ascending)
        dropped_rows: Original row indices with zero marginal
        dropped_cols: Original column indices with zero marginal
    """
    d: int
    kept_rows: Tuple[int, ...]
    kept_cols: Tuple[int, ...]
    dropped_rows: Tuple[int, ...] = ()
    dropped_cols: Tuple[int, ...] = ()

    @property
    def is_identity(self) -> bool:
        return not self.dropped_rows and not self.dropped_cols

    @property
    def is_symmetric(self) -> bool:
        """True when the same classes were dropped from rows and columns."""
        return self.dropped_rows == self.dropped_cols


@dataclass(frozen=True)
class StandardizedPair:
    """Valuations with weighted mean 0 and weighted second moment 1 under their marginals."""
    f: Valuation
    g: Valuation


@dataclass(frozen=True)
class CoefficientReport:
    """
    One functional correlation coefficient together with its optimal valuations.

    Attributes:
        value: Coefficient value in [-1, 1]
        f_opt: Standardized row valuation attaining the value
        g_opt: Standardized column valuation attaining the value
        valuation_class: Feasible set the maximum was taken over
        route: Computation route
        starts_used: Number of solver starts (summed over inner solves)
        iterations_total: Alternating iterations summed over all starts
        converged: False if any winning start hit the iteration cap
        permutation: Joint relabeling that realizes CO/ANTI optima, if any
    """
    value: float
    f_opt: Valuation
    g_opt: Valuation
    valuation_class: ValuationClass
    route: Route
    starts_used: int = 0
    iterations_total: int = 0
    converged: bool = True
    permutation: Optional[Tuple[int, ...]] = None

    def relabeled(self, valuation_class: ValuationClass) -> "CoefficientReport":
        """Same optimum reported under another (compound) class."""
        return CoefficientReport(
            value=self.value,
            f_opt=self.f_opt,
            g_opt=self.g_opt,
            valuation_class=valuation_class,
            route=self.route,
            starts_used=self.starts_used,
            iterations_total=self.iterations_total,
            converged=self.converged,
            permutation=self.permutation,
        )


@dataclass(frozen=True)
class CoefficientProfile:
    """
    All seven coefficients of one confusion matrix plus weighted kappa values.

    Attributes:
        reports: One report per valuation class
        kappa: Weighted kappa per built-in scheme (None when undefined)
        d: Class count
        mass_deficit: |raw total - 1| of the input before normalization
        class_map: Zero-marginal class bookkeeping of the input
    """
    reports: Dict[ValuationClass, CoefficientReport]
    kappa: Dict[WeightScheme, Optional[float]]
    d: int
    mass_deficit: float
    class_map: ClassMap

    def value(self, valuation_class: ValuationClass) -> float:
        return self.reports[valuation_class].value

    def values(self) -> Dict[ValuationClass, float]:
        return {cls: self.reports[cls].value for cls in PROFILE_ORDER}


@dataclass(frozen=True)
class McEstimate:
    """
    Monte Carlo lower bound for one coefficient.

    Attributes:
        value: Largest correlation among accepted pairs
        valuation_class: Class the pairs were filtered by
        accepted: Number of accepted pairs
        draws: Number of drawn pairs
    """
    value: float
    valuation_class: ValuationClass
    accepted: int
    draws: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.draws if self.draws else 0.0


@dataclass(frozen=True)
class Verdict:
    """
    Outcome of the flowchart comparison of two confusion matrices.

    Attributes:
        outcome: FirstInferior, FirstSuperior or Incomparable
        deciding_step: Class whose values decided, None when incomparable
        values: (first, second) coefficient values for every examined class
        order: Step order that was applied
        epsilon: Tie tolerance
    """
    outcome: Outcome
    deciding_step: Optional[ValuationClass]
    values: Dict[ValuationClass, Tuple[float, float]] = field(default_factory=dict)
    order: List[ValuationClass] = field(default_factory=list)
    epsilon: float = 1e-4

    def __post_init__(self):
        if (self.deciding_step is None) != (self.outcome == Outcome.INCOMPARABLE):
            raise InvariantViolationError(
                "A verdict has a deciding step exactly when it is not Incomparable",
                outcome=self.outcome.value,
            )
