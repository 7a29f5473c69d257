"""
Confusion Profiler

Functional correlation coefficients (SUP, II, ID, MON, CO, ANTI, COANTI),
weighted kappa and flowchart comparison for discrete confusion matrices.
"""

__version__ = "1.0.0"
__author__ = "Confusion Profiler Team"

from .core.coefficients import (
    anti_correlation,
    coanti_correlation,
    co_correlation,
    compute_coefficient,
    full_profile,
    mon_correlation,
)
from .core.comparator import compare, compare_profiles
from .core.data_models import (
    CoefficientProfile,
    CoefficientReport,
    McEstimate,
    Outcome,
    ValuationClass,
    Verdict,
    WeightScheme,
)
from .core.fixtures import FIXTURES
from .core.matrix_core import ConfusionMatrix, load_matrix, parse_matrix
from .core.mc_oracle import mc_estimate
from .core.solver import optimize_monotone, sup_correlation
from .core.valuation import correlation, weight_scheme, weighted_kappa

__all__ = [
    "ConfusionMatrix",
    "parse_matrix",
    "load_matrix",
    "correlation",
    "weighted_kappa",
    "weight_scheme",
    "sup_correlation",
    "optimize_monotone",
    "co_correlation",
    "anti_correlation",
    "mon_correlation",
    "coanti_correlation",
    "compute_coefficient",
    "full_profile",
    "compare",
    "compare_profiles",
    "mc_estimate",
    "FIXTURES",
    "ValuationClass",
    "WeightScheme",
    "Outcome",
    "CoefficientReport",
    "CoefficientProfile",
    "McEstimate",
    "Verdict",
]
