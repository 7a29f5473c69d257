"""
End-to-end checks against the built-in fixtures: reference values,
comparison verdicts, exact anchors and agreement between independent routes.
"""

import numpy as np
import pytest

from confusion_profiler.config.config_loader import McOptions, SolverOptions
from confusion_profiler.core.comparator import compare_profiles
from confusion_profiler.core.data_models import Outcome, ValuationClass
from confusion_profiler.core.fixtures import CHECK_TOL, CORRECTED, FIXTURES, PRINTED, reference_checks
from confusion_profiler.core.matrix_core import ConfusionMatrix
from confusion_profiler.core.mc_oracle import mc_estimate
from confusion_profiler.core.solver import FeasibleSet, multi_start_generic, sup_correlation
from confusion_profiler.core.valuation import correlation, pair_class_check

C = ValuationClass

GROUPS = sorted({fixture.variant_group or fixture.name for fixture in FIXTURES})


def _checks(fixture_profile, name):
    return [check for f in FIXTURES.variants(name)
            for check in reference_checks(f, fixture_profile(f.name).values())]


def _passing_variant(fixture_profile, name):
    for check in _checks(fixture_profile, name):
        if check.passed:
            return check.fixture
    return FIXTURES.get(name).name


@pytest.mark.parametrize("name", GROUPS)
def test_reference_values(fixture_profile, name):
    checks = _checks(fixture_profile, name)
    report = {(c.fixture, c.reference): {cls.value: round(c.deviation(cls), 5) for cls in c.expected}
              for c in checks}
    assert any(check.passed for check in checks), report
    assert all(check.tolerance == CHECK_TOL for check in checks)


ERRATA_WITNESSES = [
    ("CM4", C.ID, (-1.1081, -0.246, 1.4771), (0.6324, 0.6324, -1.5812)),
    ("CM4", C.ANTI, (-1.1081, -0.246, 1.4771), (0.6324, 0.6324, -1.5812)),
    ("CM12", C.ID, (-1.79, -1.79, 0.558, 0.558, 0.558), (0.16, 0.16, 0.16, 0.16, -6.244)),
]


@pytest.mark.parametrize("name, cls, f, g", ERRATA_WITNESSES)
def test_errata_witness_beats_printed_value(name, cls, f, g):
    fixture = FIXTURES.get(name)
    assert pair_class_check(f, g, cls)
    value = correlation(fixture.matrix(), f, g)
    assert value > fixture.expected[cls] + 0.05
    assert value == pytest.approx(fixture.errata[cls], abs=CHECK_TOL)


@pytest.mark.parametrize("name", ["CM4", "CM12"])
def test_errata_fixtures_match_corrected_values_only(fixture_profile, name):
    checks = {check.reference: check for check in _checks(fixture_profile, name)}
    assert set(checks) == {PRINTED, CORRECTED}
    assert checks[CORRECTED].passed
    assert not checks[PRINTED].passed


def test_errata_only_raise_printed_values():
    for fixture in FIXTURES:
        for cls, value in fixture.errata.items():
            assert value > fixture.expected[cls], (fixture.name, cls)


@pytest.mark.parametrize("first, second, outcome, step", [
    ("CM1", "CM2", Outcome.FIRST_INFERIOR, C.CO),
    ("CM3", "CM4", Outcome.FIRST_INFERIOR, C.CO),
    ("CM5", "CM6", Outcome.FIRST_SUPERIOR, C.CO),
    ("CM10", "CM11", Outcome.FIRST_SUPERIOR, C.CO),
    ("CM11", "CM12", Outcome.FIRST_INFERIOR, C.CO),
    ("CM10", "CM12", Outcome.FIRST_SUPERIOR, C.CO),
    ("CM(A)", "CM(B)", Outcome.FIRST_SUPERIOR, C.ANTI),
    ("CM(A)", "CM(C)", Outcome.FIRST_SUPERIOR, C.ANTI),
    ("CM(A)", "CM(D)", Outcome.FIRST_SUPERIOR, C.ANTI),
    ("CM(D)", "CM(B)", Outcome.FIRST_INFERIOR, C.ID),
    ("CM(D)", "CM(C)", Outcome.FIRST_INFERIOR, C.ID),
])
def test_published_verdicts(fixture_profile, first, second, outcome, step):
    verdict = compare_profiles(fixture_profile(_passing_variant(fixture_profile, first)),
                               fixture_profile(_passing_variant(fixture_profile, second)))
    assert verdict.outcome == outcome
    assert verdict.deciding_step == step


@pytest.mark.parametrize("first, second", [("CM(B)", "CM(C)"), ("CM0", "CM0"), ("CM10", "CM10")])
def test_incomparable_pairs(fixture_profile, first, second):
    verdict = compare_profiles(fixture_profile(first), fixture_profile(second))
    assert verdict.outcome == Outcome.INCOMPARABLE
    assert verdict.deciding_step is None


def test_exact_anchors(fixture_profile):
    diagonal = fixture_profile("DIAGONAL")
    antidiagonal = fixture_profile("ANTIDIAGONAL")
    product = fixture_profile("PRODUCT")
    for cls in (C.II, C.CO, C.SUP, C.MON, C.COANTI):
        assert diagonal.value(cls) == pytest.approx(1.0, abs=1e-6), cls
    for cls in (C.ID, C.ANTI, C.SUP, C.MON, C.COANTI):
        assert antidiagonal.value(cls) == pytest.approx(1.0, abs=1e-6), cls
    for cls in ValuationClass:
        assert product.value(cls) == pytest.approx(0.0, abs=1e-6), cls
    for value in diagonal.kappa.values():
        assert value == pytest.approx(1.0)


def test_sup_vanishes_exactly_for_independent_classifiers(rng):
    for d in (2, 3, 4, 5):
        row = rng.dirichlet(np.ones(d))
        col = rng.dirichlet(np.ones(d))
        independent = np.outer(row, col)
        assert sup_correlation(ConfusionMatrix.from_array(independent)).value == pytest.approx(0.0, abs=1e-9)

        dependent = independent.copy()
        dependent[0, 0] += 0.05
        assert sup_correlation(ConfusionMatrix.from_array(dependent)).value > 1e-3


@pytest.mark.parametrize("name", FIXTURES.names())
def test_spectral_and_alternating_sup_agree(name):
    matrix = FIXTURES.matrix(name)
    generic = multi_start_generic(matrix, FeasibleSet.for_class(C.SUP), SolverOptions(restarts=32))
    assert generic.value == pytest.approx(sup_correlation(matrix).value, abs=1e-4)


SMALL_FIXTURES = [f.name for f in FIXTURES if len(f.cells) <= 4]


@pytest.mark.parametrize("name", SMALL_FIXTURES)
@pytest.mark.parametrize("cls", [C.SUP, C.II, C.CO])
def test_monte_carlo_never_exceeds_fixture_values(fixture_profile, name, cls):
    estimate = mc_estimate(FIXTURES.matrix(name), cls, McOptions(accepted_samples=2000))
    assert estimate.value <= fixture_profile(name).value(cls) + 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("name", SMALL_FIXTURES)
def test_monte_carlo_sup_is_tight(fixture_profile, name):
    exact = fixture_profile(name).value(C.SUP)
    estimate = mc_estimate(FIXTURES.matrix(name), C.SUP, McOptions(accepted_samples=10**5))
    assert estimate.value <= exact + 1e-6
    assert exact - estimate.value <= 0.05


@pytest.mark.parametrize("first, second", [("CM1", "CM2"), ("CM10", "CM12"), ("CM(A)", "CM(D)"),
                                           ("CM(D)", "CM(C)")])
def test_verdicts_are_antisymmetric(fixture_profile, first, second):
    forward = compare_profiles(fixture_profile(first), fixture_profile(second))
    backward = compare_profiles(fixture_profile(second), fixture_profile(first))
    flipped = {Outcome.FIRST_INFERIOR: Outcome.FIRST_SUPERIOR,
               Outcome.FIRST_SUPERIOR: Outcome.FIRST_INFERIOR}
    assert backward.outcome == flipped[forward.outcome]
    assert backward.deciding_step == forward.deciding_step
