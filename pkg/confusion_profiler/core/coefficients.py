"""
The seven functional correlation coefficients of a confusion matrix.

CO and ANTI are maxima of II and ID over joint relabelings of the classes:
a comonotone pair is an increasing pair after some common reordering of the
classes, an antimonotone pair an increasing/decreasing one. MON and COANTI
are the larger of their two components.
"""

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .data_models import (
    CoefficientProfile,
    CoefficientReport,
    Route,
    ValuationClass,
)
from .matrix_core import ConfusionMatrix, collapse_null_classes, permute_jointly
from .solver import optimize_monotone, solve_batch, sup_correlation
from .valuation import kappa_profile, pair_class_check
from ..config.config_loader import SolverOptions
from ..utils.error_handler import InvariantViolationError
from ..utils.logger import get_logger

CHAIN_TOL = 1e-6

logger = get_logger(__name__)

_INNER_CLASS = {
    ValuationClass.CO: ValuationClass.II,
    ValuationClass.ANTI: ValuationClass.ID,
}


@dataclass(frozen=True)
class _Relabeling:
    """One distinct relabeled problem of the permutation search."""
    key: bytes
    perm: Tuple[int, ...]


def _relabeling(matrix: ConfusionMatrix, perm: Sequence[int]) -> _Relabeling:
    """
    Canonical form of the problem obtained by relabeling with ``perm``.

    Monotone coefficients only see the positive-marginal part of a matrix and
    do not change when the class order is reversed for both classifiers.
    Relabelings with the same collapsed matrix, up to that reversal, share a
    key; the orientation with the smaller byte string is the one solved.
    """
    perm = tuple(int(p) for p in perm)
    collapsed, _ = collapse_null_classes(permute_jointly(matrix, perm))
    cells = np.ascontiguousarray(collapsed.cells)
    shape = np.asarray(cells.shape, dtype=np.int64).tobytes()
    forward = shape + cells.tobytes()
    backward = shape + np.ascontiguousarray(cells[::-1, ::-1]).tobytes()
    if backward < forward:
        return _Relabeling(key=backward, perm=perm[::-1])
    return _Relabeling(key=forward, perm=perm)


def _pull_back(report: CoefficientReport, perm: Tuple[int, ...],
               valuation_class: ValuationClass, route: Route,
               starts_used: int, iterations_total: int) -> CoefficientReport:
    """Map optimal valuations of the relabeled matrix back to the original classes."""
    order = np.asarray(perm)
    f_opt = np.empty_like(report.f_opt)
    g_opt = np.empty_like(report.g_opt)
    f_opt[order] = report.f_opt
    g_opt[order] = report.g_opt
    return CoefficientReport(
        value=report.value,
        f_opt=f_opt,
        g_opt=g_opt,
        valuation_class=valuation_class,
        route=route,
        starts_used=starts_used,
        iterations_total=iterations_total,
        converged=report.converged,
        permutation=perm,
    )


class PermutationSearch:
    """
    Maximizes II (for CO) or ID (for ANTI) over joint class relabelings.

    Every distinct relabeling is screened with cheap options; the best
    ``refine_top`` and the identity are solved again with the full options.
    Above ``exhaustive_max_d`` classes a seeded swap local search replaces
    the enumeration and the report is flagged as heuristic.
    """

    def __init__(self, matrix: ConfusionMatrix, valuation_class: ValuationClass,
                 opts: Optional[SolverOptions] = None):
        """
        Initialize the search.

        Args:
            matrix: Confusion matrix
            valuation_class: ValuationClass.CO or ValuationClass.ANTI
            opts: Solver options
        """
        if valuation_class not in _INNER_CLASS:
            raise InvariantViolationError(f"No permutation search for {valuation_class.value}")
        self.matrix = matrix
        self.valuation_class = valuation_class
        self.inner_class = _INNER_CLASS[valuation_class]
        self.opts = opts or SolverOptions()
        self.screened: Dict[bytes, Tuple[float, Tuple[int, ...]]] = {}
        self.starts_used = 0
        self.iterations_total = 0

    @property
    def exhaustive(self) -> bool:
        return self.matrix.d <= self.opts.exhaustive_max_d

    def _screen(self, relabelings: Sequence[_Relabeling]) -> None:
        fresh: List[_Relabeling] = []
        seen = set()
        for item in relabelings:
            if item.key not in self.screened and item.key not in seen:
                seen.add(item.key)
                fresh.append(item)
        if not fresh:
            return

        reports = solve_batch(
            [permute_jointly(self.matrix, item.perm) for item in fresh],
            self.inner_class,
            self.opts.screening(),
            n_jobs=self.opts.n_jobs,
        )
        for item, report in zip(fresh, reports):
            self.screened[item.key] = (report.value, item.perm)
            self.starts_used += report.starts_used
            self.iterations_total += report.iterations_total

    def _enumerate(self) -> None:
        relabelings: Dict[bytes, _Relabeling] = {}
        for perm in permutations(range(self.matrix.d)):
            if perm[0] > perm[-1]:
                continue
            item = _relabeling(self.matrix, perm)
            relabelings.setdefault(item.key, item)
        logger.debug(f"{self.valuation_class.value}: screening {len(relabelings)} relabelings")
        self._screen(list(relabelings.values()))

    def _value_of(self, perm: Tuple[int, ...]) -> float:
        item = _relabeling(self.matrix, perm)
        self._screen([item])
        return self.screened[item.key][0]

    def _local_search(self) -> None:
        d = self.matrix.d
        rng = np.random.default_rng(np.random.SeedSequence(self.opts.seed))
        for restart in range(self.opts.heuristic_restarts):
            perm = tuple(range(d)) if restart == 0 else tuple(int(p) for p in rng.permutation(d))
            current = self._value_of(perm)
            while True:
                best_value, best_perm = current, None
                for i, j in combinations(range(d), 2):
                    neighbor = list(perm)
                    neighbor[i], neighbor[j] = neighbor[j], neighbor[i]
                    neighbor = tuple(neighbor)
                    value = self._value_of(neighbor)
                    if value > best_value:
                        best_value, best_perm = value, neighbor
                if best_perm is None:
                    break
                perm, current = best_perm, best_value
            logger.debug(f"{self.valuation_class.value}: local search restart {restart} "
                         f"ended at {current:.6f}", perm=perm)

    def run(self, identity_report: Optional[CoefficientReport] = None) -> CoefficientReport:
        """
        Execute the search.

        Args:
            identity_report: Already computed II (for CO) or ID (for ANTI)
                report of the unpermuted matrix; it is always a candidate

        Returns:
            CoefficientReport whose permutation realizes the optimum
        """
        if self.exhaustive:
            self._enumerate()
            route = Route.PERMUTATION_SEARCH
        else:
            self._local_search()
            route = Route.PERMUTATION_HEURISTIC

        identity = _relabeling(self.matrix, range(self.matrix.d))
        self._screen([identity])
        ranked = sorted(self.screened.items(), key=lambda item: (-item[1][0], item[0]))
        chosen = {key: perm for key, (_, perm) in ranked[:self.opts.refine_top]}
        chosen.setdefault(identity.key, identity.perm)

        keys = sorted(chosen)
        refined = solve_batch([permute_jointly(self.matrix, chosen[k]) for k in keys],
                              self.inner_class, self.opts)

        candidates: List[Tuple[float, bytes, int, CoefficientReport, Tuple[int, ...]]] = []
        for key, report in zip(keys, refined):
            candidates.append((report.value, key, 1, report, chosen[key]))
            self.starts_used += report.starts_used
            self.iterations_total += report.iterations_total
        if identity_report is not None:
            candidates.append((identity_report.value, identity.key, 0, identity_report,
                               tuple(range(self.matrix.d))))

        value, _, _, report, perm = min(candidates, key=lambda c: (-c[0], c[1], c[2]))
        result = _pull_back(report, perm, self.valuation_class, route,
                            self.starts_used, self.iterations_total)
        if not pair_class_check(result.f_opt, result.g_opt, self.valuation_class):
            raise InvariantViolationError("Permutation-search optimum is outside its valuation class",
                                          valuation_class=self.valuation_class.value)
        logger.debug(f"{self.valuation_class.value} = {value:.6f}", perm=perm, route=route.value)
        return result


def co_correlation(matrix: ConfusionMatrix, opts: Optional[SolverOptions] = None,
                   ii_report: Optional[CoefficientReport] = None) -> CoefficientReport:
    """
    Comonotone correlation: max over joint relabelings of the II coefficient.

    Args:
        matrix: Confusion matrix
        opts: Solver options
        ii_report: II report of ``matrix`` if already computed

    Returns:
        CoefficientReport with the realizing permutation (0-based)
    """
    return PermutationSearch(matrix, ValuationClass.CO, opts).run(ii_report)


def anti_correlation(matrix: ConfusionMatrix, opts: Optional[SolverOptions] = None,
                     id_report: Optional[CoefficientReport] = None) -> CoefficientReport:
    """Antimonotone correlation: max over joint relabelings of the ID coefficient."""
    return PermutationSearch(matrix, ValuationClass.ANTI, opts).run(id_report)


def mon_correlation(matrix: ConfusionMatrix, opts: Optional[SolverOptions] = None,
                    ii_report: Optional[CoefficientReport] = None,
                    id_report: Optional[CoefficientReport] = None) -> CoefficientReport:
    """MON = max(II, ID); on a tie the II optimum is reported."""
    ii_report = ii_report or optimize_monotone(matrix, ValuationClass.II, opts)
    id_report = id_report or optimize_monotone(matrix, ValuationClass.ID, opts)
    winner = ii_report if ii_report.value >= id_report.value else id_report
    return winner.relabeled(ValuationClass.MON)


def coanti_correlation(matrix: ConfusionMatrix, opts: Optional[SolverOptions] = None,
                       co_report: Optional[CoefficientReport] = None,
                       anti_report: Optional[CoefficientReport] = None) -> CoefficientReport:
    """COANTI = max(CO, ANTI); on a tie the CO optimum is reported."""
    co_report = co_report or co_correlation(matrix, opts)
    anti_report = anti_report or anti_correlation(matrix, opts)
    winner = co_report if co_report.value >= anti_report.value else anti_report
    return winner.relabeled(ValuationClass.COANTI)


def compute_coefficient(matrix: ConfusionMatrix, valuation_class: ValuationClass,
                        opts: Optional[SolverOptions] = None) -> CoefficientReport:
    """Single coefficient by class."""
    if valuation_class == ValuationClass.SUP:
        return sup_correlation(matrix)
    if valuation_class in (ValuationClass.II, ValuationClass.ID):
        return optimize_monotone(matrix, valuation_class, opts)
    if valuation_class == ValuationClass.CO:
        return co_correlation(matrix, opts)
    if valuation_class == ValuationClass.ANTI:
        return anti_correlation(matrix, opts)
    if valuation_class == ValuationClass.MON:
        return mon_correlation(matrix, opts)
    return coanti_correlation(matrix, opts)


def check_profile_invariants(reports: Dict[ValuationClass, CoefficientReport]) -> None:
    """
    Verify the inclusion chain between the seven coefficients.

    Raises:
        InvariantViolationError: On the first violated relation
    """
    v = {cls: report.value for cls, report in reports.items()}
    C = ValuationClass
    relations = [
        ("II <= CO", v[C.II] <= v[C.CO] + CHAIN_TOL),
        ("CO <= SUP", v[C.CO] <= v[C.SUP] + CHAIN_TOL),
        ("ID <= ANTI", v[C.ID] <= v[C.ANTI] + CHAIN_TOL),
        ("ANTI <= SUP", v[C.ANTI] <= v[C.SUP] + CHAIN_TOL),
        ("MON = max(II, ID)", v[C.MON] == max(v[C.II], v[C.ID])),
        ("COANTI = max(CO, ANTI)", v[C.COANTI] == max(v[C.CO], v[C.ANTI])),
        ("|MON| <= COANTI", abs(v[C.MON]) <= v[C.COANTI] + CHAIN_TOL),
        ("COANTI <= SUP", v[C.COANTI] <= v[C.SUP] + CHAIN_TOL),
    ]
    for name, holds in relations:
        if not holds:
            raise InvariantViolationError(f"Coefficient chain violated: {name}",
                                          **{cls.value: round(val, 9) for cls, val in v.items()})


def full_profile(matrix: ConfusionMatrix, opts: Optional[SolverOptions] = None) -> CoefficientProfile:
    """
    All seven coefficients plus weighted kappa for the built-in schemes.

    Args:
        matrix: Confusion matrix
        opts: Solver options

    Returns:
        CoefficientProfile whose coefficient chain has been verified

    Raises:
        DegenerateMatrixError: If fewer than 2 rows or columns carry mass
        InvariantViolationError: If a chain relation fails
    """
    opts = opts or SolverOptions()
    _, class_map = collapse_null_classes(matrix)

    sup = sup_correlation(matrix)
    ii = optimize_monotone(matrix, ValuationClass.II, opts)
    id_ = optimize_monotone(matrix, ValuationClass.ID, opts)
    co = co_correlation(matrix, opts, ii_report=ii)
    anti = anti_correlation(matrix, opts, id_report=id_)

    reports = {
        ValuationClass.SUP: sup,
        ValuationClass.II: ii,
        ValuationClass.ID: id_,
        ValuationClass.CO: co,
        ValuationClass.ANTI: anti,
        ValuationClass.MON: mon_correlation(matrix, opts, ii, id_),
        ValuationClass.COANTI: coanti_correlation(matrix, opts, co, anti),
    }
    check_profile_invariants(reports)

    return CoefficientProfile(
        reports=reports,
        kappa=kappa_profile(matrix),
        d=matrix.d,
        mass_deficit=matrix.mass_deficit,
        class_map=class_map,
    )
