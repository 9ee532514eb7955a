"""
Expectation values of the standard and generalized energy and position observables.
"""

import logging
from dataclasses import asdict, dataclass, replace
from typing import Dict, Optional

import numpy as np

from ..core.basis import energy_levels, integrate_grid
from ..core.exceptions import ZeroProbabilityOutcome
from ..core.states import FockVector, GridWavefunction
from ..detectors.profiles import EnergyDetectionProfile, PositionDetectionProfile
from .energy import check_no_registration_value, no_detection_prob_energy, overall_probs_energy
from .position import detection_probability_position

logger = logging.getLogger(__name__)

ZERO_PROBABILITY = 1e-14
# Relative size below which a reported expectation is round-off and printed as 0
NOISE_FLOOR = 1e-12


def expectation_H(state: FockVector) -> float:
    """<psi|H|psi> = sum_n E_n |c_n|^2."""
    return float(np.sum(energy_levels(state.n_max, state.params) * state.probabilities))


def expectation_Q(state: GridWavefunction) -> float:
    """<psi|Q|psi> = int q |psi(q)|^2 dq."""
    return float(integrate_grid(state.grid.points * state.density, state.grid))


def expectation_H0(state: FockVector, profile: EnergyDetectionProfile, h0: float = 0.0) -> float:
    """
    Expectation of the generalized energy.

    Args:
        state: Normalized Fock vector
        profile: Energy detection profile
        h0: No-registration value (must not be an eigenvalue)

    Returns:
        h0 * p(h0) + sum_n E_n p(n) |c_n|^2
    """
    check_no_registration_value(h0, state.params, state.n_max)
    levels = energy_levels(state.n_max, state.params)
    detected = float(np.sum(levels * overall_probs_energy(state, profile)))
    return h0 * no_detection_prob_energy(state, profile) + detected


def expectation_Q0(state: GridWavefunction, profile: PositionDetectionProfile, q0: float = 0.0) -> float:
    """
    Expectation of the generalized position, q0 + int (q - q0) p(q) |psi|^2 dq.

    Args:
        state: Normalized grid wavefunction
        profile: Position detection profile
        q0: No-registration value

    Returns:
        Generalized position expectation
    """
    q = state.grid.points
    p = profile.evaluate(q)
    return float(q0) + float(integrate_grid((q - q0) * p * state.density, state.grid))


def expectation_gap_H(state: FockVector, profile: EnergyDetectionProfile) -> float:
    """<H> - <H0> at h0 = 0: sum_n E_n (1 - p(n)) |c_n|^2."""
    levels = energy_levels(state.n_max, state.params)
    p = profile.probabilities(state.n_max)
    return float(np.sum(levels * (1.0 - p) * state.probabilities))


def expectation_gap_Q(state: GridWavefunction, profile: PositionDetectionProfile, literal: bool = False) -> float:
    """
    <Q> - <Q0> at q0 = 0.

    Args:
        state: Normalized grid wavefunction
        profile: Position detection profile
        literal: Drop the factor q and return the undetected mass int (1 - p) |psi|^2 dq

    Returns:
        int q (1 - p) |psi|^2 dq, or the literal form
    """
    q = state.grid.points
    undetected = (1.0 - profile.evaluate(q)) * state.density
    if literal:
        return float(integrate_grid(undetected, state.grid))
    return float(integrate_grid(q * undetected, state.grid))


def detected_expectation_H0(state: FockVector, profile: EnergyDetectionProfile) -> float:
    """Energy expectation conditional on detection, sum E_n p(n)|c_n|^2 / sum p(n)|c_n|^2."""
    overall = overall_probs_energy(state, profile)
    total = float(np.sum(overall))
    if total < ZERO_PROBABILITY:
        raise ZeroProbabilityOutcome("Energy detection never occurs; conditional expectation undefined")
    return float(np.sum(energy_levels(state.n_max, state.params) * overall)) / total


def detected_expectation_Q0(state: GridWavefunction, profile: PositionDetectionProfile) -> float:
    """Position expectation conditional on detection, int q p |psi|^2 / int p |psi|^2."""
    total = detection_probability_position(state, profile)
    if total < ZERO_PROBABILITY:
        raise ZeroProbabilityOutcome("Position detection never occurs; conditional expectation undefined")
    q = state.grid.points
    return float(integrate_grid(q * profile.evaluate(q) * state.density, state.grid)) / total


@dataclass
class ExpectationReport:
    """All expectation quantities of one state, in output order."""
    H: float
    H0: float
    gap_H: float
    Q: float
    Q0: float
    gap_Q: float
    gap_Q_literal: float
    H0_detected: Optional[float] = None
    Q0_detected: Optional[float] = None

    def to_dict(self) -> Dict[str, Optional[float]]:
        return asdict(self)

    def snapped(self, energy_scale: float, length_scale: float) -> "ExpectationReport":
        """
        Copy with round-off residue set to exactly zero.

        A value counts as residue when its magnitude is below NOISE_FLOOR
        times the natural unit of its quantity; the literal gap is a
        probability and uses 1.
        """
        scales = {name: energy_scale for name in ("H", "H0", "gap_H", "H0_detected")}
        scales.update({name: length_scale for name in ("Q", "Q0", "gap_Q", "Q0_detected")})
        scales["gap_Q_literal"] = 1.0

        changes = {}
        for name, scale in scales.items():
            value = getattr(self, name)
            if value is not None and abs(value) < NOISE_FLOOR * scale:
                changes[name] = 0.0
        return replace(self, **changes)


def expectation_report(
    fock: FockVector,
    wf: GridWavefunction,
    energy_profile: EnergyDetectionProfile,
    position_profile: PositionDetectionProfile,
    h0: float = 0.0,
    q0: float = 0.0,
) -> ExpectationReport:
    """
    Evaluate every expectation quantity for one state in both representations.

    Detected-only expectations are left as None when the matching detection
    probability vanishes.
    """
    try:
        h0_detected = detected_expectation_H0(fock, energy_profile)
    except ZeroProbabilityOutcome:
        h0_detected = None
    try:
        q0_detected = detected_expectation_Q0(wf, position_profile)
    except ZeroProbabilityOutcome:
        q0_detected = None

    report = ExpectationReport(
        H=expectation_H(fock),
        H0=expectation_H0(fock, energy_profile, h0),
        gap_H=expectation_gap_H(fock, energy_profile),
        Q=expectation_Q(wf),
        Q0=expectation_Q0(wf, position_profile, q0),
        gap_Q=expectation_gap_Q(wf, position_profile),
        gap_Q_literal=expectation_gap_Q(wf, position_profile, literal=True),
        H0_detected=h0_detected,
        Q0_detected=q0_detected,
    ).snapped(fock.params.quantum, fock.params.length_scale)
    logger.debug(f"Expectation report: {report}")
    return report

