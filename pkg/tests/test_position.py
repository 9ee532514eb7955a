"""
Tests for the generalized position observable.
"""

import math

import numpy as np
import pytest
from scipy.special import erf

from esrosc.core.basis import default_grid, integrate_grid
from esrosc.core.exceptions import (
    DetectionCertain,
    InvalidSelection,
    SelectionContainsQ0,
    ZeroProbabilityOutcome,
)
from esrosc.core.models import Answer, OscillatorParams
from esrosc.core.states import (
    FockVector,
    equal_superposition,
    fidelity,
    fock_to_position,
    ground_state,
    normalize,
)
from esrosc.detectors.profiles import (
    make_constant_profile,
    make_gaussian_window_profile,
    make_table_profile,
)
from esrosc.observables.position import (
    IntervalUnion,
    collapse_position_no_detection,
    collapse_position_no_detection_fock,
    collapse_position_yes,
    conditional_prob_position,
    detection_operator,
    detection_probability_position,
    gpp_position_property,
    no_detection_prob_position,
    overall_prob_position,
    position_effect,
)

POSITION = "position"


def constant(p):
    return make_constant_profile(p, POSITION)


class TestIntervalUnion:
    """Test interval-union selections."""

    def test_of_merges(self):
        union = IntervalUnion.of((2, 3), (0, 1), (0.5, 1.5))
        assert union.intervals == ((0.0, 1.5), (2.0, 3.0))

    def test_unbounded_ends(self):
        union = IntervalUnion.of((None, 0.0))
        assert union.intervals == ((-math.inf, 0.0),)

    def test_overlapping_rejected(self):
        with pytest.raises(InvalidSelection):
            IntervalUnion(intervals=((0.0, 2.0), (1.0, 3.0)))

    def test_reversed_rejected(self):
        with pytest.raises(InvalidSelection):
            IntervalUnion.of((1.0, 0.0))

    def test_partition(self):
        bins = IntervalUnion.partition([1.0, -1.0])
        assert [b.intervals for b in bins] == [
            ((-math.inf, -1.0),),
            ((-1.0, 1.0),),
            ((1.0, math.inf),),
        ]

    def test_contains_and_complement(self):
        union = IntervalUnion.of((0, 1))
        points = [-0.5, 0.0, 0.5, 1.0, 2.0]
        assert union.contains(points).tolist() == [False, True, True, True, False]
        assert union.real_complement().contains(points).tolist() == [True, False, False, False, True]

    def test_complement_selection_flips_q0(self):
        union = IntervalUnion.of((0, 1), includes_q0=True)
        other = union.complement_selection()
        assert other.complement
        assert not other.includes_q0


class TestPositionEffect:
    """Test pointwise effect weights."""

    def setup_method(self):
        self.grid = default_grid(16, OscillatorParams())

    def test_real_line_standard_limit(self):
        effect = position_effect(IntervalUnion.real_line(), constant(1.0), self.grid)
        assert np.all(effect.weights == 1.0)

    def test_only_q0(self):
        effect = position_effect(IntervalUnion.empty(includes_q0=True), constant(0.7), self.grid)
        assert np.allclose(effect.weights, 0.3)

    def test_half_line(self):
        effect = position_effect(IntervalUnion.of((0.0, None)), constant(0.7), self.grid)
        q = self.grid.points
        assert np.allclose(effect.weights[q >= 0], 0.7)
        assert np.all(effect.weights[q < -1e-9] == 0.0)

    def test_complementary_effects_sum_to_identity(self):
        profile = make_gaussian_window_profile(0.9, 0.5, 1.0)
        sel = IntervalUnion.of((-2.0, -1.0), (0.5, 3.0))
        total = position_effect(sel, profile, self.grid).weights + position_effect(
            sel.complement_selection(), profile, self.grid
        ).weights
        assert np.allclose(total, 1.0)


class TestPositionProbabilities:
    """Test conditional, overall and no-registration probabilities."""

    def setup_method(self):
        self.params = OscillatorParams()
        self.grid = default_grid(64, self.params)
        self.ground = fock_to_position(ground_state(self.params, 64), self.grid)
        self.superposition = fock_to_position(equal_superposition([0, 1], self.params, 64), self.grid)

    def test_half_line(self):
        sel = IntervalUnion.of((None, 0.0))
        assert conditional_prob_position(self.ground, sel) == pytest.approx(0.5, abs=1e-8)

    def test_unit_interval(self):
        sel = IntervalUnion.of((-1.0, 1.0))
        assert conditional_prob_position(self.ground, sel) == pytest.approx(erf(1.0), abs=1e-6)
        assert erf(1.0) == pytest.approx(0.8427008, abs=1e-7)

    def test_real_line(self):
        assert conditional_prob_position(self.superposition, IntervalUnion.real_line()) == pytest.approx(
            1.0, abs=1e-8
        )

    def test_trapezoid_rule(self):
        sel = IntervalUnion.of((-1.0, 1.0))
        assert conditional_prob_position(self.ground, sel, "trapezoid") == pytest.approx(erf(1.0), abs=1e-4)

    def test_conditional_rejects_q0(self):
        with pytest.raises(SelectionContainsQ0):
            conditional_prob_position(self.ground, IntervalUnion.empty(includes_q0=True))

    def test_standard_limit(self):
        sel = IntervalUnion.of((-0.5, 2.0))
        assert overall_prob_position(self.superposition, sel, constant(1.0)) == conditional_prob_position(
            self.superposition, sel
        )

    def test_constant_profile_scales(self):
        assert overall_prob_position(self.ground, IntervalUnion.real_line(), constant(0.7)) == pytest.approx(
            0.7, abs=1e-8
        )

    def test_only_q0(self):
        sel = IntervalUnion.empty(includes_q0=True)
        assert overall_prob_position(self.ground, sel, constant(0.7)) == pytest.approx(0.3, abs=1e-8)
        assert no_detection_prob_position(self.ground, constant(0.7)) == pytest.approx(0.3, abs=1e-12)

    def test_selection_with_q0_complements(self):
        profile = make_gaussian_window_profile(0.9, 0.0, 1.0)
        sel = IntervalUnion.of((-1.5, -0.5), (1.0, None), includes_q0=True)
        total = overall_prob_position(self.superposition, sel, profile) + overall_prob_position(
            self.superposition, sel.complement_selection(), profile
        )
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_additive_over_disjoint_sets(self):
        profile = make_gaussian_window_profile(0.8, 0.3, 1.5)
        left = IntervalUnion.of((-1.0, 0.0))
        right = IntervalUnion.of((0.5, 2.0))
        both = IntervalUnion.of((-1.0, 0.0), (0.5, 2.0))
        parts = overall_prob_position(self.superposition, left, profile) + overall_prob_position(
            self.superposition, right, profile
        )
        assert overall_prob_position(self.superposition, both, profile) == pytest.approx(parts, abs=1e-12)

    def test_monotone(self):
        profile = make_gaussian_window_profile(0.8, 0.0, 1.0)
        inner = overall_prob_position(self.superposition, IntervalUnion.of((-0.5, 0.5)), profile)
        outer = overall_prob_position(self.superposition, IntervalUnion.of((-1.0, 1.0)), profile)
        assert inner <= outer

    def test_detection_plus_no_detection(self):
        profile = make_table_profile([[-2.0, 0.2], [0.0, 0.9], [2.0, 0.3]], POSITION)
        total = detection_probability_position(self.superposition, profile) + no_detection_prob_position(
            self.superposition, profile
        )
        assert total == pytest.approx(1.0, abs=1e-12)


class TestPositionCollapse:
    """Test the post-measurement states."""

    def setup_method(self):
        self.params = OscillatorParams()
        self.grid = default_grid(64, self.params)
        self.q = self.grid.points
        self.superposition = fock_to_position(equal_superposition([0, 1], self.params, 64), self.grid)

    def test_yes_truncates(self):
        post = collapse_position_yes(self.superposition, IntervalUnion.of((0.0, None)), constant(1.0))
        assert np.all(post.samples[self.q < -1e-9] == 0)
        assert post.norm() == pytest.approx(1.0, abs=1e-12)
        positive = self.q > 0
        ratio = post.samples[positive] / self.superposition.samples[positive]
        assert np.allclose(ratio, ratio[0])

    def test_yes_window(self):
        profile = make_gaussian_window_profile(0.9, 0.0, 1.0)
        post = collapse_position_yes(self.superposition, IntervalUnion.real_line(), profile)
        expected = normalize(self.superposition.with_samples(profile.evaluate(self.q) * self.superposition.samples))
        assert np.allclose(post.samples, expected.samples)

    def test_yes_outside_grid(self):
        with pytest.raises(ZeroProbabilityOutcome):
            collapse_position_yes(self.superposition, IntervalUnion.of((30.0, 40.0)), constant(1.0))

    def test_no_detection_constant(self):
        post = collapse_position_no_detection(self.superposition, constant(0.5))
        assert fidelity(post, self.superposition) == pytest.approx(1.0, abs=1e-12)

    def test_no_detection_step_profile(self):
        profile = make_table_profile([[-0.01, 1.0], [0.0, 0.0]], POSITION)
        post = collapse_position_no_detection(self.superposition, profile)
        assert np.allclose(post.samples[self.q < -0.005], 0.0)
        positive = self.q >= 0
        ratio = post.samples[positive] / self.superposition.samples[positive]
        assert np.allclose(ratio, ratio[0])

    def test_no_detection_certain(self):
        with pytest.raises(DetectionCertain):
            collapse_position_no_detection(self.superposition, constant(1.0))

    def test_gpp_yes_real_line_identity(self):
        post = gpp_position_property(self.superposition, IntervalUnion.real_line(), constant(1.0), Answer.YES)
        assert fidelity(post, self.superposition) == pytest.approx(1.0, abs=1e-12)

    def test_gpp_no_half_line(self):
        post = gpp_position_property(self.superposition, IntervalUnion.of((0.0, None)), constant(1.0), "no")
        assert np.all(post.samples[self.q >= 0] == 0)
        assert post.norm() == pytest.approx(1.0, abs=1e-12)

    def test_gpp_no_partial_detection(self):
        sel = IntervalUnion.of((0.0, None))
        post = gpp_position_property(self.superposition, sel, constant(0.7), Answer.NO)
        weights = np.where(self.q >= -1e-9, 0.3, 1.0)
        expected = normalize(self.superposition.with_samples(weights * self.superposition.samples))
        assert np.allclose(post.samples, expected.samples)


class TestDetectionOperator:
    """Test the Fock-basis representation of the position detection effect."""

    def setup_method(self):
        self.params = OscillatorParams()

    def test_constant_profile_is_scaled_identity(self):
        matrix = detection_operator(constant(0.6), 10, self.params)
        assert np.allclose(matrix, 0.6 * np.eye(11), atol=1e-10)

    def test_symmetric(self):
        matrix = detection_operator(make_gaussian_window_profile(0.9, 0.4, 1.2), 12, self.params)
        assert np.allclose(matrix, matrix.T)

    def test_matches_grid_integrals(self):
        profile = make_gaussian_window_profile(0.9, 0.3, 1.0)
        grid = default_grid(8, self.params)
        table = np.array([
            fock_to_position(FockVector.basis_state(n, self.params, 8), grid).samples.real for n in range(9)
        ])
        p = profile.evaluate(grid.points)
        dense = np.array([[integrate_grid(p * table[m] * table[n], grid) for n in range(9)] for m in range(9)])
        assert np.allclose(detection_operator(profile, 8, self.params), dense, atol=1e-9)

    def test_fock_no_detection_matches_grid(self):
        profile = make_gaussian_window_profile(0.9, 0.0, 1.0)
        state = ground_state(self.params, 40)
        grid = default_grid(40, self.params)
        fock_post = collapse_position_no_detection_fock(state, profile)
        grid_post = collapse_position_no_detection(fock_to_position(state, grid), profile)
        assert fidelity(fock_post, grid_post) == pytest.approx(1.0, abs=1e-7)

    def test_fock_no_detection_certain(self):
        with pytest.raises(DetectionCertain):
            collapse_position_no_detection_fock(ground_state(self.params, 8), constant(1.0))
