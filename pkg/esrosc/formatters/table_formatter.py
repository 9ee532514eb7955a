"""
CSV tables for the probs, expect and compare commands.
"""

from typing import List

from ..core.models import ComparisonRow, ProbabilityRow
from ..observables.expectations import ExpectationReport
from .csv_writer import write_csv


class ProbabilityTableFormatter:
    """Per-outcome conditional, detection and overall probabilities."""

    HEADER = ["observable", "outcome", "value", "conditional", "detection", "overall", "identity_residual"]

    def format(self, rows: List[ProbabilityRow]) -> str:
        """
        Format probability rows as CSV.

        Args:
            rows: Rows in output order

        Returns:
            CSV text
        """
        return write_csv(self.HEADER, (
            [
                row.observable.value,
                row.outcome,
                row.value,
                row.conditional,
                row.detection,
                row.overall,
                row.identity_residual,
            ]
            for row in rows
        ))


class ExpectationTableFormatter:
    """Expectation quantities as a two-column table."""

    HEADER = ["quantity", "value"]
    LABELS = [
        ("H", "<H>"),
        ("H0", "<H0>"),
        ("gap_H", "<H>-<H0>"),
        ("Q", "<Q>"),
        ("Q0", "<Q0>"),
        ("gap_Q", "<Q>-<Q0>"),
        ("gap_Q_literal", "<Q>-<Q0>:literal"),
        ("H0_detected", "<H0>:detected"),
        ("Q0_detected", "<Q0>:detected"),
    ]

    def format(self, report: ExpectationReport) -> str:
        values = report.to_dict()
        return write_csv(self.HEADER, ([label, values[key]] for key, label in self.LABELS))


class ComparisonTableFormatter:
    """Standard quantum and ESR predictions side by side."""

    HEADER = ["observable", "outcome", "qm", "esr", "difference", "abs_difference"]

    def format(self, rows: List[ComparisonRow]) -> str:
        return write_csv(self.HEADER, (
            [row.observable, row.outcome, row.qm, row.esr, row.difference, row.abs_difference]
            for row in rows
        ))
