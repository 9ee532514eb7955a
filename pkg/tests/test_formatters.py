"""
Tests for CSV output formatters.
"""

import math

import numpy as np
import pytest

from esrosc import __version__
from esrosc.core.basis import build_grid
from esrosc.core.exceptions import ParseError
from esrosc.core.models import ComparisonRow, MeasurementRecord, Observable, OscillatorParams, ProbabilityRow
from esrosc.core.states import FockVector, GridWavefunction
from esrosc.formatters.csv_writer import format_float, read_csv, write_csv
from esrosc.formatters.state_formatter import StateFormatter
from esrosc.formatters.table_formatter import (
    ComparisonTableFormatter,
    ExpectationTableFormatter,
    ProbabilityTableFormatter,
)
from esrosc.formatters.trajectory_formatter import TrajectoryFormatter
from esrosc.observables.expectations import ExpectationReport
from esrosc.sampling.sampler import Trajectory


class TestCsvWriter:
    """Test the shared CSV helpers."""

    @pytest.mark.parametrize("value,expected", [
        (0.5, "0.5"),
        (1.0, "1"),
        (1 / 3, "0.333333333333"),
        (-0.0, "0"),
        (1e-20, "1e-20"),
        (None, ""),
        (math.nan, "nan"),
    ])
    def test_format_float(self, value, expected):
        assert format_float(value) == expected

    def test_write_with_comments(self):
        text = write_csv(["a", "b"], [["x", 0.25], ["y", None]], comments=["seed 1"])
        assert text == "# seed 1\na,b\nx,0.25\ny,\n"

    def test_read_skips_comments(self):
        rows = read_csv("# meta\n\na,b\n1,2\n")
        assert rows == [["a", "b"], ["1", "2"]]


class TestTableFormatters:
    """Test the probs, expect and compare tables."""

    def test_probability_table(self):
        rows = [
            ProbabilityRow(Observable.ENERGY, "E_0", 0.5, 1.0, 0.8, 0.8),
            ProbabilityRow(Observable.ENERGY, "no_registration", 0.0, None, None, 0.2),
        ]
        text = ProbabilityTableFormatter().format(rows)
        assert text.splitlines() == [
            "observable,outcome,value,conditional,detection,overall,identity_residual",
            "energy,E_0,0.5,1,0.8,0.8,0",
            "energy,no_registration,0,,,0.2,",
        ]

    def test_bin_rows_leave_residual_blank(self):
        row = ProbabilityRow(Observable.POSITION, "bin_0", -1.0, 0.5, 0.8, 0.4, detection_derived=True)
        assert row.identity_residual is None
        text = ProbabilityTableFormatter().format([row])
        assert text.splitlines()[1] == "position,bin_0,-1,0.5,0.8,0.4,"

    def test_expectation_table(self):
        report = ExpectationReport(H=1.0, H0=0.8, gap_H=0.2, Q=0.5, Q0=0.4, gap_Q=0.1, gap_Q_literal=0.2)
        lines = ExpectationTableFormatter().format(report).splitlines()
        assert lines[0] == "quantity,value"
        assert lines[1] == "<H>,1"
        assert "<Q>-<Q0>:literal,0.2" in lines
        assert lines[-1] == "<Q0>:detected,"

    def test_comparison_table(self):
        rows = [
            ComparisonRow("energy", "E_0", 1.0, 0.8),
            ComparisonRow("energy|position", "no_detection_fidelity", None, 0.94),
        ]
        lines = ComparisonTableFormatter().format(rows).splitlines()
        assert lines[1] == "energy,E_0,1,0.8,-0.2,0.2"
        assert lines[2] == "energy|position,no_detection_fidelity,,0.94,,"


class TestStateFormatter:
    """Test state CSV export and import."""

    def setup_method(self):
        self.params = OscillatorParams()
        self.formatter = StateFormatter()

    def test_fock_format(self):
        state = FockVector.from_coefficients([0.6, 0.8j], self.params)
        assert self.formatter.format(state) == "n,re,im\n0,0.6,0\n1,0,0.8\n"

    def test_fock_parse_pads(self):
        state = self.formatter.parse("n,re,im\n0,0.6,0\n2,0,0.8\n", n_max=4)
        assert state.n_max == 4
        assert np.allclose(state.amplitudes, [0.6, 0, 0.8j, 0, 0])

    def test_grid_parse(self):
        grid = build_grid(-1.0, 1.0, 5)
        wf = GridWavefunction(samples=np.array([0, 1, 2, 1, 0]), grid=grid, params=self.params)
        parsed = self.formatter.parse(self.formatter.format(wf))
        assert isinstance(parsed, GridWavefunction)
        assert parsed.grid == grid
        assert np.allclose(parsed.samples, wf.samples)

    @pytest.mark.parametrize("text", [
        "",
        "n,re,im\n",
        "n,re,im\n0,1\n",
        "n,re,im\n0,1,0\n0,0,1\n",
        "q,re,im\n0,1,0\n0.5,1,0\n2,1,0\n",
        "x,y,z\n0,1,0\n",
    ])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            self.formatter.parse(text)


class TestTrajectoryFormatter:
    """Test trajectory CSV output."""

    def test_metadata_and_rows(self):
        record = MeasurementRecord(
            step=0,
            observable=Observable.ENERGY,
            outcome_label="E_1",
            outcome_value=1.5,
            probability=0.4,
            fidelity_to_initial=0.7,
            state=None,
        )
        text = TrajectoryFormatter().format([Trajectory(trial=0, records=[record])], seed=9)
        lines = text.splitlines()
        assert lines[:4] == [f"# esr-osc {__version__}", "# rng PCG64", "# seed 9", "# trials 1"]
        assert lines[4] == "trial,step,observable,outcome_label,outcome_value,probability_analytic"
        assert lines[5] == "0,0,energy,E_1,1.5,0.4"
