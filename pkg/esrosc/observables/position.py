"""
Generalized position Q0: interval-union effects on the grid and the no-registration outcome q0.

Pointwise effect weights sample the interval indicator at grid nodes. Integrals
over a selection run over the grid cells whose midpoints lie in it, so
complementary selections partition the grid exactly. Endpoints that fall
between nodes are resolved to the nearest cell boundary: refine the grid if
that O(dq) error matters.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from ..core.basis import gauss_hermite_rule, integrate_cells, integrate_grid, scaled_hermite_table
from ..core.exceptions import (
    DetectionCertain,
    InvalidSelection,
    SelectionContainsQ0,
    ZeroProbabilityOutcome,
)
from ..core.models import Answer, Grid, IntegrationMethod, OscillatorParams
from ..core.states import FockVector, GridWavefunction, normalize
from ..detectors.profiles import PositionDetectionProfile

logger = logging.getLogger(__name__)

ZERO_PROBABILITY = 1e-14
NODE_TOLERANCE = 1e-6  # fraction of the grid spacing
QUADRATURE_TOLERANCE = 1e-10  # residual norm treated as zero after Gauss-Hermite sums


def _bound(value: Optional[float], default: float) -> float:
    return default if value is None else float(value)


@dataclass(frozen=True)
class IntervalUnion:
    """
    Borel set X for the generalized position: a union of closed intervals.

    With complement=True the set is the complement of the union.
    includes_q0 adds the no-registration outcome.
    """
    intervals: Tuple[Tuple[float, float], ...] = ()
    complement: bool = False
    includes_q0: bool = False

    def __post_init__(self):
        cleaned = []
        for pair in self.intervals:
            try:
                a, b = pair
            except (TypeError, ValueError):
                raise InvalidSelection(f"Interval must be a pair [a, b], got {pair!r}")
            a, b = _bound(a, -math.inf), _bound(b, math.inf)
            if math.isnan(a) or math.isnan(b) or a > b:
                raise InvalidSelection(f"Interval [{a}, {b}] needs a <= b")
            cleaned.append((a, b))
        for (_, b1), (a2, _) in zip(cleaned, cleaned[1:]):
            if a2 <= b1:
                raise InvalidSelection("Intervals must be sorted and disjoint; use IntervalUnion.of to merge")
        object.__setattr__(self, "intervals", tuple(cleaned))

    @classmethod
    def of(cls, *pairs: Sequence[Optional[float]], includes_q0: bool = False) -> "IntervalUnion":
        """Sort and merge arbitrary closed intervals into a valid union."""
        spans = sorted((_bound(a, -math.inf), _bound(b, math.inf)) for a, b in pairs)
        merged = []
        for a, b in spans:
            if a > b:
                raise InvalidSelection(f"Interval [{a}, {b}] needs a <= b")
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return cls(intervals=tuple(merged), includes_q0=includes_q0)

    @classmethod
    def real_line(cls, includes_q0: bool = False) -> "IntervalUnion":
        return cls(intervals=((-math.inf, math.inf),), includes_q0=includes_q0)

    @classmethod
    def empty(cls, includes_q0: bool = False) -> "IntervalUnion":
        return cls(intervals=(), includes_q0=includes_q0)

    @classmethod
    def partition(cls, edges: Iterable[float]) -> Tuple["IntervalUnion", ...]:
        """Bins (-inf, e0], [e0, e1], ..., [ek, inf) for sorted edges."""
        cuts = [-math.inf] + sorted(float(e) for e in edges) + [math.inf]
        return tuple(cls(intervals=((a, b),)) for a, b in zip(cuts, cuts[1:]))

    def complement_selection(self) -> "IntervalUnion":
        """R \\ X, which flips both the interval set and q0 membership."""
        return IntervalUnion(
            intervals=self.intervals,
            complement=not self.complement,
            includes_q0=not self.includes_q0,
        )

    def contains(self, points, tolerance: float = 0.0) -> np.ndarray:
        """Membership of the real points in X (q0 aside)."""
        points = np.asarray(points, dtype=float)
        inside = np.zeros(points.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (points >= a - tolerance) & (points <= b + tolerance)
        return ~inside if self.complement else inside

    def node_mask(self, grid: Grid) -> np.ndarray:
        """Grid nodes lying in X, with a round-off tolerance at interval ends."""
        if self.complement:
            return ~self.real_complement().node_mask(grid)
        return self.contains(grid.points, NODE_TOLERANCE * grid.spacing)

    def cell_mask(self, grid: Grid) -> np.ndarray:
        """Grid cells [q_i, q_{i+1}] whose midpoints lie in X."""
        pts = grid.points
        return self.contains(0.5 * (pts[:-1] + pts[1:]))

    def real_complement(self) -> "IntervalUnion":
        """Complement of the real part of X; q0 membership is kept."""
        return IntervalUnion(intervals=self.intervals, complement=not self.complement, includes_q0=self.includes_q0)


@dataclass(frozen=True, eq=False)
class PositionEffect:
    """Effect T(X) sampled as weights w(q_i) in [0, 1] on a grid."""
    weights: np.ndarray
    grid: Grid
    includes_q0: bool


def position_effect(sel: IntervalUnion, profile: PositionDetectionProfile, grid: Grid) -> PositionEffect:
    """
    Pointwise weights of T_psi^Q(X).

    Args:
        sel: Selection X
        profile: Position detection profile
        grid: Grid to sample on

    Returns:
        PositionEffect with w = p 1_X (q0 not in X) or w = 1 - p 1_{R\\X} (q0 in X)
    """
    p = profile.evaluate(grid.points)
    if sel.includes_q0:
        outside = sel.complement_selection().node_mask(grid)
        weights = 1.0 - np.where(outside, p, 0.0)
    else:
        weights = np.where(sel.node_mask(grid), p, 0.0)
    return PositionEffect(weights=weights, grid=grid, includes_q0=sel.includes_q0)


def _integrate_over(values: np.ndarray, sel: IntervalUnion, grid: Grid, method) -> float:
    return float(integrate_cells(values, grid, sel.cell_mask(grid), method))


def conditional_prob_position(
    state: GridWavefunction,
    sel: IntervalUnion,
    method=IntegrationMethod.SIMPSON,
) -> float:
    """
    Probability of finding the particle in X given detection, int_X |psi|^2 dq.

    Args:
        state: Normalized grid wavefunction
        sel: Selection X (must not contain q0)
        method: Composite rule for the runs of X

    Returns:
        Conditional probability
    """
    if sel.includes_q0:
        raise SelectionContainsQ0("Conditional probabilities need a selection without q0")
    return _integrate_over(state.density, sel, state.grid, method)


def overall_prob_position(
    state: GridWavefunction,
    sel: IntervalUnion,
    profile: PositionDetectionProfile,
    method=IntegrationMethod.SIMPSON,
) -> float:
    """
    Overall probability of the property (Q0, X).

    int_X p |psi|^2 dq when q0 is not in X, else 1 minus the value for R \\ X.
    """
    if sel.includes_q0:
        return 1.0 - overall_prob_position(state, sel.complement_selection(), profile, method)
    p = profile.evaluate(state.grid.points)
    return _integrate_over(p * state.density, sel, state.grid, method)


def no_detection_prob_position(state: GridWavefunction, profile: PositionDetectionProfile) -> float:
    """Overall probability of the no-registration outcome q0, 1 - int p |psi|^2 dq."""
    p = profile.evaluate(state.grid.points)
    return 1.0 - float(integrate_grid(p * state.density, state.grid))


def detection_probability_position(state: GridWavefunction, profile: PositionDetectionProfile) -> float:
    """Probability that a position measurement registers the particle at all."""
    p = profile.evaluate(state.grid.points)
    return float(integrate_grid(p * state.density, state.grid))


def _weighted_state(state: GridWavefunction, weights: np.ndarray, error, message: str) -> GridWavefunction:
    weighted = weights * state.samples
    denominator = math.sqrt(max(float(integrate_grid(np.abs(weighted) ** 2, state.grid)), 0.0))
    if denominator < ZERO_PROBABILITY:
        raise error(message)
    return state.with_samples(weighted / denominator)


def collapse_position_yes(
    state: GridWavefunction,
    sel: IntervalUnion,
    profile: PositionDetectionProfile,
) -> GridWavefunction:
    """
    Post-measurement state after the property (Q0, X) is found.

    psi'(q) is proportional to w(q) psi(q) with the yes-branch effect of X.
    """
    if overall_prob_position(state, sel, profile) <= ZERO_PROBABILITY:
        raise ZeroProbabilityOutcome("Selection has zero overall probability in this state")
    effect = position_effect(sel, profile, state.grid)
    return _weighted_state(
        state, effect.weights, ZeroProbabilityOutcome, "Selection has no weight on the grid"
    )


def collapse_position_no_detection(state: GridWavefunction, profile: PositionDetectionProfile) -> GridWavefunction:
    """
    Post-measurement state when the position measurement does not detect the particle.

    psi'(q) = (1 - p(q)) psi(q) / sqrt(int (1 - p)^2 |psi|^2 dq).
    """
    if no_detection_prob_position(state, profile) <= ZERO_PROBABILITY:
        raise DetectionCertain("Detection is certain; the no-detection branch is empty")
    p = profile.evaluate(state.grid.points)
    return _weighted_state(state, 1.0 - p, DetectionCertain, "No-detection branch has zero norm")


def gpp_position_property(
    state: GridWavefunction,
    sel: IntervalUnion,
    profile: PositionDetectionProfile,
    answer: Answer,
) -> GridWavefunction:
    """
    Generalized projection postulate for the property (Q0, X).

    Args:
        state: Pre-measurement state
        sel: Selection X
        profile: Position detection profile
        answer: YES applies T(X), NO applies T(R \\ X)

    Returns:
        Normalized post-measurement state
    """
    answer = Answer(answer)
    branch = sel if answer is Answer.YES else sel.complement_selection()
    effect = position_effect(branch, profile, state.grid)
    return _weighted_state(
        state, effect.weights, ZeroProbabilityOutcome, f"Answer {answer.value} has zero probability"
    )


def detection_operator(
    profile: PositionDetectionProfile,
    n_max: int,
    params: OscillatorParams,
    order: Optional[int] = None,
) -> np.ndarray:
    """
    Fock-basis matrix of int p(q) |q><q| dq via Gauss-Hermite quadrature.

    Accurate for smooth profiles; kinks in table profiles converge slowly.

    Args:
        profile: Position detection profile
        n_max: Truncation index
        params: Oscillator parameters
        order: Quadrature order (default 2 * n_max + 60)

    Returns:
        Real symmetric (n_max + 1) x (n_max + 1) matrix
    """
    rule = gauss_hermite_rule(order or 2 * n_max + 60)
    x = np.asarray(rule.nodes)
    # the weight function exp(-x^2) is divided back out of psi_m psi_n
    w = np.exp(np.log(np.asarray(rule.weights)) + x * x)
    table = scaled_hermite_table(n_max, x)
    p = profile.evaluate(x * params.length_scale)
    logger.debug(f"Detection operator: N_max={n_max}, Gauss-Hermite order {rule.order}")
    return (table * (w * p)) @ table.T


def collapse_position_no_detection_fock(
    state: FockVector,
    profile: PositionDetectionProfile,
    n_max: Optional[int] = None,
    order: Optional[int] = None,
) -> FockVector:
    """
    Position no-detection post-state computed in the energy eigenbasis.

    Applies I - D with D from detection_operator in a basis of size n_max
    (default: the state's own truncation).
    """
    size = state.n_max if n_max is None else n_max
    padded = FockVector.from_coefficients(state.amplitudes, state.params, size)
    no_detect = np.eye(size + 1) - detection_operator(profile, size, state.params, order)
    weighted = no_detect @ padded.amplitudes
    if float(np.sqrt(np.sum(np.abs(weighted) ** 2))) < QUADRATURE_TOLERANCE:
        raise DetectionCertain("No-detection branch has zero norm")
    return normalize(padded.with_amplitudes(weighted))
