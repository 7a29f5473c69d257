"""
Core components: matrix model, valuations, solvers, coefficients and comparison.

Only the dependency-free modules are re-exported here; import the solver,
coefficient and comparison modules directly.
"""

from .data_models import (
    ClassMap,
    CoefficientProfile,
    CoefficientReport,
    McEstimate,
    Outcome,
    Route,
    ValuationClass,
    Verdict,
    WeightScheme,
)
from .matrix_core import ConfusionMatrix, load_matrix, parse_matrix

__all__ = [
    'ClassMap',
    'CoefficientProfile',
    'CoefficientReport',
    'McEstimate',
    'Outcome',
    'Route',
    'ValuationClass',
    'Verdict',
    'WeightScheme',
    'ConfusionMatrix',
    'load_matrix',
    'parse_matrix',
]
