from dataclasses import dataclass
from typing import Dict

import pytest

from confusion_profiler.config.config_loader import ComparatorConfig, parse_order
from confusion_profiler.core import comparator
from confusion_profiler.core.comparator import LOWER_IS_BETTER, compare, compare_profiles, step_outcome
from confusion_profiler.core.data_models import Outcome, ValuationClass, Verdict
from confusion_profiler.core.fixtures import FIXTURES
from confusion_profiler.utils.error_handler import ConfigurationError, InvariantViolationError

C = ValuationClass


@dataclass
class StubProfile:
    values: Dict[ValuationClass, float]

    def value(self, valuation_class: ValuationClass) -> float:
        return self.values[valuation_class]


def _profile(co=0.5, anti=0.2, ii=0.4, id_=0.1):
    return StubProfile({C.CO: co, C.ANTI: anti, C.II: ii, C.ID: id_})


class TestStepOutcome:
    def test_higher_is_better(self):
        assert step_outcome(C.CO, 0.6, 0.5, 1e-4) == Outcome.FIRST_SUPERIOR
        assert step_outcome(C.II, 0.5, 0.6, 1e-4) == Outcome.FIRST_INFERIOR

    def test_lower_is_better(self):
        assert LOWER_IS_BETTER == {C.ANTI, C.ID}
        assert step_outcome(C.ANTI, 0.2, 0.3, 1e-4) == Outcome.FIRST_SUPERIOR
        assert step_outcome(C.ID, 0.3, 0.2, 1e-4) == Outcome.FIRST_INFERIOR

    def test_tie_within_epsilon(self):
        assert step_outcome(C.CO, 0.50000, 0.50005, 1e-4) is None
        assert step_outcome(C.CO, 0.5, 0.5, 0.0) is None


class TestCompareProfiles:
    def test_first_step_decides(self):
        verdict = compare_profiles(_profile(co=0.7), _profile(co=0.5))
        assert verdict.outcome == Outcome.FIRST_SUPERIOR
        assert verdict.deciding_step == C.CO

    def test_ties_fall_through(self):
        verdict = compare_profiles(_profile(anti=0.1, ii=0.1), _profile(anti=0.1, ii=0.9))
        assert verdict.outcome == Outcome.FIRST_INFERIOR
        assert verdict.deciding_step == C.II
        assert verdict.values[C.CO] == (0.5, 0.5)

    def test_all_tied_is_incomparable(self):
        verdict = compare_profiles(_profile(), _profile())
        assert verdict.outcome == Outcome.INCOMPARABLE
        assert verdict.deciding_step is None
        assert set(verdict.values) == {C.CO, C.ANTI, C.II, C.ID}

    def test_custom_order(self):
        config = ComparatorConfig(order=parse_order("ID,CO"))
        verdict = compare_profiles(_profile(co=0.9, id_=0.3), _profile(co=0.1, id_=0.1), config)
        assert verdict.outcome == Outcome.FIRST_INFERIOR
        assert verdict.deciding_step == C.ID
        assert verdict.order == [C.ID, C.CO]

    def test_epsilon_widens_ties(self):
        config = ComparatorConfig(epsilon=0.5)
        verdict = compare_profiles(_profile(co=0.7), _profile(co=0.5), config)
        assert verdict.outcome == Outcome.INCOMPARABLE
        assert verdict.epsilon == 0.5


class TestVerdict:
    def test_deciding_step_required_unless_incomparable(self):
        with pytest.raises(InvariantViolationError):
            Verdict(Outcome.FIRST_SUPERIOR, None)
        with pytest.raises(InvariantViolationError):
            Verdict(Outcome.INCOMPARABLE, C.CO)


class TestComparatorConfig:
    def test_rejects_repeated_classes(self):
        with pytest.raises(ConfigurationError):
            ComparatorConfig(order=(C.CO, C.CO))

    def test_rejects_empty_order_and_negative_epsilon(self):
        with pytest.raises(ConfigurationError):
            ComparatorConfig(order=())
        with pytest.raises(ConfigurationError):
            ComparatorConfig(epsilon=-1.0)


def test_self_comparison_is_incomparable(fast_opts):
    matrix = FIXTURES.matrix("CM1")
    verdict = compare(matrix, matrix, opts=fast_opts)
    assert verdict.outcome == Outcome.INCOMPARABLE


def test_compare_fixtures_at_co(fast_opts):
    verdict = compare(FIXTURES.matrix("CM1"), FIXTURES.matrix("CM2"), opts=fast_opts)
    assert verdict.outcome == Outcome.FIRST_INFERIOR
    assert verdict.deciding_step == C.CO


def test_compare_computes_only_the_ordered_classes(monkeypatch, fast_opts):
    computed = []
    real = comparator.compute_coefficient

    def recording(matrix, valuation_class, opts=None):
        computed.append(valuation_class)
        return real(matrix, valuation_class, opts)

    monkeypatch.setattr(comparator, "compute_coefficient", recording)
    config = ComparatorConfig(order=parse_order("II,ID"))
    verdict = compare(FIXTURES.matrix("CM10"), FIXTURES.matrix("CM11"), config, fast_opts)
    assert set(computed) == {C.II, C.ID}
    assert len(computed) == 4
    assert set(verdict.values) == {C.II, C.ID}
