"""
Tests for detection-probability profiles.
"""

import json
import math

import numpy as np
import pytest

from esrosc.core.exceptions import InputError, OutOfRange, ParseError
from esrosc.core.models import Observable
from esrosc.detectors.profiles import (
    EnergyDetectionProfile,
    PositionDetectionProfile,
    ProfileKind,
    load_profile,
    make_constant_profile,
    make_gaussian_window_profile,
    make_geometric_profile,
    make_table_profile,
    profile_from_dict,
)


class TestConstantProfile:
    """Test constant profiles."""

    def test_value_everywhere(self):
        profile = make_constant_profile(0.8)
        assert profile(5) == 0.8
        assert np.all(profile.evaluate(np.arange(10)) == 0.8)

    def test_observable(self):
        assert isinstance(make_constant_profile(0.5), EnergyDetectionProfile)
        assert isinstance(make_constant_profile(0.5, Observable.POSITION), PositionDetectionProfile)
        assert make_constant_profile(0.5, "position").observable is Observable.POSITION

    @pytest.mark.parametrize("p", [-0.1, 1.2, math.nan])
    def test_out_of_range(self, p):
        with pytest.raises(OutOfRange):
            make_constant_profile(p)

    def test_out_of_range_is_input_error(self):
        with pytest.raises(InputError):
            make_constant_profile(2.0)


class TestGeometricProfile:
    """Test p(n) = p0 r^n."""

    def test_values(self):
        profile = make_geometric_profile(0.9, 0.5)
        assert profile(0) == pytest.approx(0.9)
        assert profile(2) == pytest.approx(0.225)

    def test_probabilities_array(self):
        profile = make_geometric_profile(1.0, 0.5)
        assert np.allclose(profile.probabilities(3), [1.0, 0.5, 0.25, 0.125])

    @pytest.mark.parametrize("p0,r", [(0.5, 2.0), (0.5, 0.0), (1.5, 0.5)])
    def test_invalid(self, p0, r):
        with pytest.raises(OutOfRange):
            make_geometric_profile(p0, r)


class TestGaussianWindowProfile:
    """Test Gaussian position windows."""

    def test_peak_and_decay(self):
        profile = make_gaussian_window_profile(0.9, 1.0, 2.0)
        assert profile(1.0) == pytest.approx(0.9)
        assert profile(3.0) == pytest.approx(0.9 * math.exp(-0.5))

    @pytest.mark.parametrize("width", [0.0, -1.0])
    def test_invalid_width(self, width):
        with pytest.raises(OutOfRange):
            make_gaussian_window_profile(0.9, 0.0, width)


class TestTableProfile:
    """Test piecewise-linear tables."""

    def setup_method(self):
        self.profile = make_table_profile([[0, 1.0], [2, 0.5]])

    def test_interpolates(self):
        assert self.profile(1) == pytest.approx(0.75)

    def test_clamps_outside(self):
        assert self.profile(-1) == pytest.approx(1.0)
        assert self.profile(5) == pytest.approx(0.5)

    def test_non_increasing_abscissae(self):
        with pytest.raises(ParseError):
            make_table_profile([[1, 0.5], [1, 0.6]])

    def test_value_out_of_range(self):
        with pytest.raises(OutOfRange):
            make_table_profile([[0, 0.5], [1, 1.5]])

    def test_empty(self):
        with pytest.raises(ParseError):
            make_table_profile([])


class TestLoadProfile:
    """Test JSON profile documents."""

    def test_geometric(self):
        profile = load_profile('{"kind": "geometric", "p0": 0.9, "r": 0.8}')
        assert profile.kind is ProfileKind.GEOMETRIC
        assert profile.observable is Observable.ENERGY
        assert profile(1) == pytest.approx(0.72)

    def test_gaussian_defaults_to_position(self):
        profile = load_profile('{"kind": "gaussian-window", "p_max": 0.9, "width": 1.0}')
        assert profile.observable is Observable.POSITION
        assert profile(0.0) == pytest.approx(0.9)

    @pytest.mark.parametrize("alias,kind", [
        ("geometric-decay", ProfileKind.GEOMETRIC),
        ("piecewise-linear", ProfileKind.TABLE),
        ("Constant", ProfileKind.CONSTANT),
    ])
    def test_kind_aliases(self, alias, kind):
        data = {"kind": alias, "p0": 0.9, "r": 0.8, "table": [[0, 0.5]], "p": 0.5}
        assert profile_from_dict(data).kind is kind

    def test_explicit_observable(self):
        profile = load_profile('{"kind": "table", "observable": "position", "table": [[-1, 0.2], [1, 0.8]]}')
        assert isinstance(profile, PositionDetectionProfile)
        assert profile(0.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("text", [
        "{not json",
        '{"kind": "triangle"}',
        '{"kind": "geometric", "p0": 0.9}',
        '{"kind": 3}',
        '["constant"]',
    ])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            load_profile(text)

    def test_geometric_rejected_for_position(self):
        with pytest.raises(ParseError):
            load_profile('{"kind": "geometric", "p0": 0.9, "r": 0.8}', Observable.POSITION)

    def test_gaussian_rejected_for_energy(self):
        with pytest.raises(ParseError):
            load_profile('{"kind": "gaussian-window", "p_max": 0.9, "width": 1.0}', Observable.ENERGY)

    def test_to_json_reloads(self):
        profile = make_gaussian_window_profile(0.7, -1.0, 0.5)
        assert load_profile(profile.to_json()) == profile
        assert json.loads(profile.to_json())["kind"] == "gaussian-window"
