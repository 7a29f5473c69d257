"""
Report generator for the Confusion Profiler.

This module turns profiles, verdicts, Monte Carlo checks and kappa values
into report documents, and renders them either as stable JSON (sorted keys,
fixed rounding) or as aligned plain-text tables.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from tabulate import tabulate

from ..core.data_models import (
    PROFILE_ORDER,
    CoefficientProfile,
    McEstimate,
    Verdict,
)
from ..core.matrix_core import ConfusionMatrix
from .logger import get_logger

JSON_FORMAT = "json"
TABLE_FORMAT = "table"
REPORT_FORMATS = (JSON_FORMAT, TABLE_FORMAT)


class JSONReporter:
    """
    Builds and renders report documents.

    Every number in a document is rounded once, when the document is built,
    so rendering the same document twice (or re-rendering a parsed one)
    gives identical bytes.
    """

    def __init__(self, digits: int = 6):
        """
        Initialize the reporter.

        Args:
            digits: Decimal places kept for every reported number
        """
        self.digits = digits
        self.logger = get_logger(__name__)

    def _round(self, value: Optional[float]) -> Optional[float]:
        if value is None:
            return None
        # + 0.0 turns -0.0 into 0.0
        return round(float(value), self.digits) + 0.0

    def _round_all(self, values: Iterable[float]) -> List[float]:
        return [self._round(v) for v in values]

    def matrix_section(self, matrix: ConfusionMatrix, source: str) -> Dict[str, Any]:
        return {
            "source": source,
            "d": matrix.d,
            "cells": [self._round_all(row) for row in matrix.cells],
            "labels": list(matrix.labels) if matrix.labels is not None else None,
        }

    def profile_document(self, profile: CoefficientProfile, matrix: ConfusionMatrix,
                         source: str, seed: int, restarts: int) -> Dict[str, Any]:
        """
        Convert a CoefficientProfile to a JSON-serializable document.

        Args:
            profile: Computed profile
            matrix: Matrix the profile was computed for
            source: Fixture name or file path the matrix came from
            seed: Solver seed
            restarts: Random restarts per solve

        Returns:
            Dict with matrix, coefficients, kappa and meta sections
        """
        coefficients = {}
        for cls in PROFILE_ORDER:
            report = profile.reports[cls]
            coefficients[cls.value] = {
                "value": self._round(report.value),
                "f": self._round_all(report.f_opt),
                "g": self._round_all(report.g_opt),
                "route": report.route.value,
                "permutation": list(report.permutation) if report.permutation is not None else None,
            }

        return {
            "matrix": self.matrix_section(matrix, source),
            "coefficients": coefficients,
            "kappa": {scheme.value: self._round(value) for scheme, value in profile.kappa.items()},
            "meta": {
                "seed": seed,
                "restarts": restarts,
                "mass_deficit": self._round(profile.mass_deficit),
                "dropped_rows": list(profile.class_map.dropped_rows),
                "dropped_cols": list(profile.class_map.dropped_cols),
            },
        }

    def check_section(self, checks: Sequence[Any]) -> Dict[str, Any]:
        """
        Reference-value check of one or more fixture variants.

        Args:
            checks: FixtureCheck results, one per variant and reference reading

        Returns:
            Dict naming the first matching variant and reference reading (or
            None) and the deviations of every check
        """
        variants = []
        matched = matched_reference = None
        for check in checks:
            deviations = {cls.value: self._round(check.deviation(cls)) for cls in check.expected}
            variants.append({
                "fixture": check.fixture,
                "reference": check.reference,
                "passed": check.passed,
                "max_deviation": max(deviations.values(), default=0.0),
                "deviations": deviations,
            })
            if check.passed and matched is None:
                matched, matched_reference = check.fixture, check.reference
        return {"matched": matched, "matched_reference": matched_reference,
                "tolerance": checks[0].tolerance if checks else None,
                "variants": variants}

    def verdict_document(self, verdict: Verdict, first_source: str, second_source: str,
                         seed: int, restarts: int) -> Dict[str, Any]:
        return {
            "first": first_source,
            "second": second_source,
            "outcome": verdict.outcome.value,
            "deciding_step": verdict.deciding_step.value if verdict.deciding_step else None,
            "steps": [
                {
                    "class": step.value,
                    "first": self._round(verdict.values[step][0]),
                    "second": self._round(verdict.values[step][1]),
                }
                for step in verdict.order
            ],
            "meta": {"seed": seed, "restarts": restarts, "epsilon": verdict.epsilon},
        }

    def mc_document(self, estimate: McEstimate, exact: float, matrix: ConfusionMatrix,
                    source: str, seed: int, violation: bool) -> Dict[str, Any]:
        return {
            "matrix": self.matrix_section(matrix, source),
            "class": estimate.valuation_class.value,
            "mc_estimate": self._round(estimate.value),
            "exact": self._round(exact),
            "gap": self._round(exact - estimate.value),
            "accepted": estimate.accepted,
            "draws": estimate.draws,
            "acceptance_rate": self._round(estimate.acceptance_rate),
            "violation": violation,
            "meta": {"seed": seed},
        }

    def kappa_document(self, kappas: Dict[str, Optional[float]], matrix: ConfusionMatrix,
                       source: str) -> Dict[str, Any]:
        return {
            "matrix": self.matrix_section(matrix, source),
            "kappa": {name: self._round(value) for name, value in kappas.items()},
            "meta": {"mass_deficit": self._round(matrix.mass_deficit)},
        }

    def fixtures_document(self, fixtures: Iterable[Any]) -> Dict[str, Any]:
        return {
            "fixtures": [
                {
                    "name": fixture.name,
                    "d": len(fixture.cells),
                    "source": fixture.source,
                    "expected": {cls.value: value for cls, value in fixture.expected.items()},
                    "errata": {cls.value: value for cls, value in fixture.errata.items()},
                }
                for fixture in fixtures
            ]
        }

    def render(self, document: Dict[str, Any], fmt: str = JSON_FORMAT) -> str:
        """
        Render a document as JSON or as plain-text tables.

        Args:
            document: Document built by one of the ``*_document`` methods
            fmt: ``json`` or ``table``

        Returns:
            str: Rendered report ending with a newline
        """
        if fmt == JSON_FORMAT:
            return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        if fmt != TABLE_FORMAT:
            raise ValueError(f"Unknown report format '{fmt}'. Expected one of: {', '.join(REPORT_FORMATS)}")

        if "coefficients" in document:
            return self._render_profile_table(document)
        if "outcome" in document:
            return self._render_verdict_table(document)
        if "mc_estimate" in document:
            return self._render_mc_table(document)
        if "fixtures" in document:
            return self._render_fixtures_table(document)
        return self._render_kappa_table(document)

    def write(self, text: str, output_path: Optional[str] = None) -> None:
        """
        Print a rendered report to stdout or save it to a file.

        Raises:
            IOError: If the file cannot be written
        """
        if output_path is None:
            print(text, end="")
            return
        path = Path(output_path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            self.logger.info(f"Report written to {path}")
        except IOError as e:
            self.logger.error(f"Failed to write report to {path}: {e}")
            raise

    def _fmt(self, value: Optional[float]) -> str:
        return "null" if value is None else f"{value:.{self.digits}f}"

    def _vector(self, values: Sequence[float]) -> str:
        return " ".join(self._fmt(v) for v in values)

    def _matrix_header(self, matrix: Dict[str, Any]) -> str:
        return f"Matrix: {matrix['source']} (d={matrix['d']})"

    def _render_profile_table(self, document: Dict[str, Any]) -> str:
        rows = []
        for cls in PROFILE_ORDER:
            entry = document["coefficients"][cls.value]
            rows.append([cls.value, self._fmt(entry["value"]), entry["route"],
                         self._vector(entry["f"]), self._vector(entry["g"])])
        parts = [
            self._matrix_header(document["matrix"]),
            tabulate(rows, headers=["Coefficient", "Value", "Route", "f", "g"],
                     colalign=("left", "right", "left", "left", "left")),
            "",
            tabulate([[name, self._fmt(value)] for name, value in sorted(document["kappa"].items())],
                     headers=["Kappa weights", "Value"], colalign=("left", "right")),
            "",
            f"mass_deficit: {self._fmt(document['meta']['mass_deficit'])}",
        ]
        if "check" in document:
            check = document["check"]
            if check["matched"]:
                parts.append(f"check: passed, matched {check['matched']} ({check['matched_reference']} values)")
            else:
                parts.append("check: FAILED")
        return "\n".join(parts) + "\n"

    def _render_verdict_table(self, document: Dict[str, Any]) -> str:
        rows = [[step["class"], self._fmt(step["first"]), self._fmt(step["second"]),
                 "<-" if step["class"] == document["deciding_step"] else ""]
                for step in document["steps"]]
        table = tabulate(rows, headers=["Step", document["first"], document["second"], "Decides"],
                         colalign=("left", "right", "right", "left"))
        decided = f" at {document['deciding_step']}" if document["deciding_step"] else ""
        return f"{table}\n\nVerdict: {document['outcome']}{decided}\n"

    def _render_mc_table(self, document: Dict[str, Any]) -> str:
        rows = [
            ["class", document["class"]],
            ["mc_estimate", self._fmt(document["mc_estimate"])],
            ["exact", self._fmt(document["exact"])],
            ["gap", self._fmt(document["gap"])],
            ["accepted", document["accepted"]],
            ["draws", document["draws"]],
            ["acceptance_rate", self._fmt(document["acceptance_rate"])],
            ["violation", document["violation"]],
        ]
        return self._matrix_header(document["matrix"]) + "\n" + tabulate(rows, tablefmt="plain") + "\n"

    def _render_kappa_table(self, document: Dict[str, Any]) -> str:
        rows = [[name, self._fmt(value)] for name, value in document["kappa"].items()]
        table = tabulate(rows, headers=["Weights", "Kappa"], colalign=("left", "right"))
        return self._matrix_header(document["matrix"]) + "\n" + table + "\n"

    def _render_fixtures_table(self, document: Dict[str, Any]) -> str:
        classes = [cls.value for cls in PROFILE_ORDER]
        rows = []
        for fixture in document["fixtures"]:
            expected, errata = fixture["expected"], fixture.get("errata", {})
            rows.append([fixture["name"], fixture["d"]] + [self._reference_cell(expected, errata, c) for c in classes])
        return tabulate(rows, headers=["Fixture", "d"] + classes) + "\n"

    @staticmethod
    def _reference_cell(expected: Dict[str, float], errata: Dict[str, float], name: str) -> str:
        if name not in expected:
            return ""
        if name in errata:
            return f"{expected[name]:.4f} ({errata[name]:.4f})"
        return f"{expected[name]:.4f}"

