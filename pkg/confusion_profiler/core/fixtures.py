"""
Built-in confusion matrices with published reference coefficient values.

CM3 and CM5 are printed with a grand total of about 0.9; the variants CM3'
and CM5' replace the entry 0.3285 by 0.4285, which restores a total of 1.
Both variants carry the same reference values.

Some printed reference values are not maxima: a feasible pair of the class
reaches a higher correlation. Those fixtures carry errata, the corrected
values, next to the printed ones, and a check passes against either reading.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .coefficients import full_profile
from .data_models import ValuationClass
from .matrix_core import ConfusionMatrix
from ..config.config_loader import SolverOptions
from ..utils.error_handler import UnknownFixtureError

C = ValuationClass
Cells = Tuple[Tuple[float, ...], ...]

PRINTED = "printed"
CORRECTED = "corrected"


@dataclass(frozen=True)
class Fixture:
    """
    A named matrix and the coefficient values it is expected to produce.

    Attributes:
        name: Canonical fixture name
        cells: Matrix entries as printed (not normalized)
        expected: Reference values, rounded to 4 decimals
        source: Where the reference values come from
        variant_group: Name shared by alternative readings of one printed matrix
        errata: Corrected values for printed references that are not maxima
    """
    name: str
    cells: Cells
    expected: Dict[ValuationClass, float] = field(default_factory=dict)
    source: str = ""
    variant_group: Optional[str] = None
    errata: Dict[ValuationClass, float] = field(default_factory=dict)

    def matrix(self) -> ConfusionMatrix:
        return ConfusionMatrix.from_array(self.cells)

    def references(self) -> List[Tuple[str, Dict[ValuationClass, float]]]:
        """Printed reference values, then the corrected ones when errata exist."""
        readings = [(PRINTED, dict(self.expected))]
        if self.errata:
            readings.append((CORRECTED, {**self.expected, **self.errata}))
        return readings


def _five(ii: float, id_: float, co: float, anti: float, sup: float) -> Dict[ValuationClass, float]:
    return {C.II: ii, C.ID: id_, C.CO: co, C.ANTI: anti, C.SUP: sup}


_PUBLISHED = "published comparison study"

_FIXTURES: Tuple[Fixture, ...] = (
    Fixture(
        "CM0",
        ((0.1, 0.0, 0.1),
         (0.2, 0.0, 0.2),
         (0.0, 0.2, 0.2)),
        {**_five(0.5345, 0.0, 0.5345, 0.6123, 0.7071), C.MON: 0.5345, C.COANTI: 0.6123},
        "published worked example",
    ),
    Fixture(
        "CM1",
        ((0.2, 0.0, 0.1),
         (0.1, 0.1, 0.0),
         (0.2, 0.1, 0.2)),
        _five(0.2309, 0.0476, 0.4330, 0.0476, 0.4537),
        _PUBLISHED,
    ),
    Fixture(
        "CM2",
        ((0.1, 0.0, 0.0),
         (0.0, 0.4, 0.0),
         (0.2, 0.2, 0.1)),
        _five(0.5091, 0.2182, 0.7165, 0.2182, 0.7165),
        _PUBLISHED,
    ),
    Fixture(
        "CM3",
        ((0.1428, 0.0, 0.1428),
         (0.0, 0.0, 0.0),
         (0.3285, 0.2857, 0.0)),
        _five(-0.0912, 0.6454, 0.3999, 0.6892, 0.6892),
        _PUBLISHED + ", entries as printed",
        "CM3",
    ),
    Fixture(
        "CM3'",
        ((0.1428, 0.0, 0.1428),
         (0.0, 0.0, 0.0),
         (0.4285, 0.2857, 0.0)),
        _five(-0.0912, 0.6454, 0.3999, 0.6892, 0.6892),
        _PUBLISHED + ", 0.3285 read as 0.4285",
        "CM3",
    ),
    Fixture(
        "CM4",
        ((0.1428, 0.0, 0.1428),
         (0.0, 0.2857, 0.1428),
         (0.1428, 0.1428, 0.0)),
        _five(0.2999, 0.3281, 0.5902, 0.3281, 0.5902),
        _PUBLISHED,
        errata={C.ID: 0.4281, C.ANTI: 0.4281},
    ),
    Fixture(
        "CM5",
        ((0.1428, 0.1428, 0.0, 0.0),
         (0.0, 0.1428, 0.0, 0.1428),
         (0.0, 0.0, 0.0, 0.3285),
         (0.0, 0.0, 0.0, 0.0)),
        _five(0.8660, -0.3535, 0.8660, 0.8416, 0.8660),
        _PUBLISHED + ", entries as printed",
        "CM5",
    ),
    Fixture(
        "CM5'",
        ((0.1428, 0.1428, 0.0, 0.0),
         (0.0, 0.1428, 0.0, 0.1428),
         (0.0, 0.0, 0.0, 0.4285),
         (0.0, 0.0, 0.0, 0.0)),
        _five(0.8660, -0.3535, 0.8660, 0.8416, 0.8660),
        _PUBLISHED + ", 0.3285 read as 0.4285",
        "CM5",
    ),
    Fixture(
        "CM6",
        ((0.0, 0.0, 0.1428, 0.0),
         (0.1428, 0.1428, 0.1428, 0.0),
         (0.1428, 0.1428, 0.1428, 0.0),
         (0.0, 0.0, 0.0, 0.0)),
        _five(-0.0912, 0.4714, 0.2581, 0.4714, 0.4714),
        _PUBLISHED,
    ),
    Fixture(
        "CM10",
        ((0.0, 0.0, 0.0, 0.0, 0.0),
         (0.0, 0.2083, 0.0291, 0.0, 0.0),
         (0.0, 0.0083, 0.3916, 0.0083, 0.0),
         (0.0, 0.0, 0.0458, 0.1625, 0.0),
         (0.0, 0.0, 0.0, 0.0208, 0.1250)),
        _five(0.9459, -0.2109, 0.9459, -0.0512, 0.9459),
        _PUBLISHED,
    ),
    Fixture(
        "CM11",
        ((0.0, 0.0, 0.0, 0.0, 0.0),
         (0.0, 0.0, 0.1875, 0.0500, 0.0),
         (0.0, 0.0, 0.0083, 0.3625, 0.0375),
         (0.0, 0.0, 0.0, 0.0250, 0.1833),
         (0.0, 0.0, 0.0, 0.0, 0.1458)),
        _five(0.8966, -0.2039, 0.8966, 0.8434, 0.8966),
        _PUBLISHED,
    ),
    Fixture(
        "CM12",
        ((0.0, 0.0, 0.0, 0.0, 0.0),
         (0.0, 0.2083, 0.0291, 0.0, 0.0),
         (0.0, 0.0083, 0.3916, 0.0083, 0.0),
         (0.0, 0.0, 0.0875, 0.1208, 0.0),
         (0.0, 0.0, 0.0, 0.1208, 0.0250)),
        _five(0.9096, -0.2173, 0.9096, 0.5520, 0.9096),
        _PUBLISHED,
        errata={C.ID: -0.0894},
    ),
    Fixture(
        "CM(A)",
        ((0.3076, 0.0, 0.0, 0.0),
         (0.0, 0.4615, 0.0, 0.0),
         (0.0, 0.0, 0.0, 0.0),
         (0.0, 0.0, 0.0, 0.2307)),
        _five(1.0, -0.3651, 1.0, -0.3651, 1.0),
        _PUBLISHED + ", lettered set",
    ),
    Fixture(
        "CM(B)",
        ((0.0, 0.3076, 0.0, 0.0),
         (0.0, 0.0, 0.4615, 0.0),
         (0.0, 0.0, 0.0, 0.0),
         (0.0, 0.0, 0.0, 0.2307)),
        _five(1.0, -0.3651, 1.0, 1.0, 1.0),
        _PUBLISHED + ", lettered set",
    ),
    Fixture(
        "CM(C)",
        ((0.0, 0.0, 0.3076, 0.0),
         (0.0, 0.0, 0.4615, 0.0),
         (0.0, 0.0, 0.0, 0.0),
         (0.0, 0.0, 0.0, 0.2307)),
        _five(1.0, -0.3651, 1.0, 1.0, 1.0),
        _PUBLISHED + ", lettered set",
    ),
    Fixture(
        "CM(D)",
        ((0.0, 0.3076, 0.0, 0.0),
         (0.4615, 0.0, 0.0, 0.0),
         (0.0, 0.0, 0.0, 0.0),
         (0.0, 0.0, 0.0, 0.2307)),
        _five(1.0, 0.6172, 1.0, 1.0, 1.0),
        _PUBLISHED + ", lettered set",
    ),
    Fixture(
        "DIAGONAL",
        ((0.2, 0.0, 0.0),
         (0.0, 0.3, 0.0),
         (0.0, 0.0, 0.5)),
        {C.II: 1.0, C.CO: 1.0, C.SUP: 1.0, C.MON: 1.0, C.COANTI: 1.0},
        "exact anchor: perfect agreement",
    ),
    Fixture(
        "ANTIDIAGONAL",
        ((0.0, 0.0, 0.2),
         (0.0, 0.3, 0.0),
         (0.5, 0.0, 0.0)),
        {C.ID: 1.0, C.ANTI: 1.0, C.SUP: 1.0, C.MON: 1.0, C.COANTI: 1.0},
        "exact anchor: perfectly reversed agreement",
    ),
    Fixture(
        "PRODUCT",
        tuple(tuple(float(x) for x in row)
              for row in np.outer([0.2, 0.3, 0.5], [0.4, 0.4, 0.2]).round(12)),
        {cls: 0.0 for cls in ValuationClass},
        "exact anchor: independent classifiers",
    ),
)


def normalize_name(name: str) -> str:
    """Lookup key: case-insensitive, ignores parentheses, spaces, '_' and '-'."""
    key = name.strip().upper()
    if key.endswith("PRIME"):
        key = key[: -len("PRIME")] + "'"
    for char in "() _-":
        key = key.replace(char, "")
    return key


class FixtureSet:
    """Registry of the built-in fixtures."""

    def __init__(self, fixtures: Tuple[Fixture, ...] = _FIXTURES):
        self._fixtures = fixtures
        self._index = {normalize_name(f.name): f for f in fixtures}

    def names(self) -> List[str]:
        return [f.name for f in self._fixtures]

    def __iter__(self):
        return iter(self._fixtures)

    def __len__(self) -> int:
        return len(self._fixtures)

    def get(self, name: str) -> Fixture:
        """
        Look up a fixture; ``CM(A)``, ``CMA`` and ``cm(a)`` all name the same one.

        Raises:
            UnknownFixtureError: If no fixture matches
        """
        fixture = self._index.get(normalize_name(name))
        if fixture is None:
            raise UnknownFixtureError(f"Unknown fixture '{name}'",
                                      available=", ".join(self.names()))
        return fixture

    def matrix(self, name: str) -> ConfusionMatrix:
        return self.get(name).matrix()

    def variants(self, name: str) -> List[Fixture]:
        """All readings of the printed matrix behind ``name`` (just itself for most)."""
        fixture = self.get(name)
        if fixture.variant_group is None:
            return [fixture]
        return [f for f in self._fixtures if f.variant_group == fixture.variant_group]


FIXTURES = FixtureSet()


CHECK_TOL = 1e-3


@dataclass(frozen=True)
class FixtureCheck:
    """Computed values of one fixture against its reference values."""
    fixture: str
    values: Dict[ValuationClass, float]
    expected: Dict[ValuationClass, float]
    tolerance: float = CHECK_TOL
    reference: str = PRINTED

    def deviation(self, valuation_class: ValuationClass) -> float:
        return abs(self.values[valuation_class] - self.expected[valuation_class])

    @property
    def passed(self) -> bool:
        return all(self.deviation(cls) <= self.tolerance for cls in self.expected)


def reference_checks(fixture: Fixture, values: Dict[ValuationClass, float],
                     tolerance: float = CHECK_TOL) -> List[FixtureCheck]:
    """One check of computed values per reference reading of ``fixture``."""
    return [FixtureCheck(fixture.name, values, expected, tolerance, reference)
            for reference, expected in fixture.references()]


def check_fixture(name: str, opts: Optional[SolverOptions] = None,
                  tolerance: float = CHECK_TOL) -> List[FixtureCheck]:
    """
    Compute every reading of a fixture and compare it with the reference values.

    For CM3 and CM5 both the printed and the corrected matrix are computed.
    Fixtures with errata are checked against the printed and the corrected
    values. The fixture passes when any check matches.

    Args:
        name: Fixture name (any accepted spelling)
        opts: Solver options
        tolerance: Largest accepted absolute deviation

    Returns:
        List of FixtureCheck, one per variant and reference reading
    """
    checks = []
    for fixture in FIXTURES.variants(name):
        profile = full_profile(fixture.matrix(), opts)
        checks.extend(reference_checks(fixture, profile.values(), tolerance))
    return checks
