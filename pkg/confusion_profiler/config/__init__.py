"""
Configuration options and the YAML configuration loader.
"""

from .config_loader import (
    DEFAULT_SEED,
    ComparatorConfig,
    ConfigLoader,
    McOptions,
    SolverOptions,
    parse_order,
)

__all__ = [
    'DEFAULT_SEED',
    'ComparatorConfig',
    'ConfigLoader',
    'McOptions',
    'SolverOptions',
    'parse_order',
]
