"""
Generalized energy H0: the Hamiltonian's discrete spectrum plus the no-registration outcome h0.

Effects are diagonal in the Fock basis, so every operation reduces to
weighting the amplitudes c_n.
"""

import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Iterable

import numpy as np

from ..core.exceptions import (
    DetectionCertain,
    IndexBeyondTruncation,
    InvalidNoRegistrationValue,
    InvalidSelection,
    ZeroProbabilityOutcome,
)
from ..core.models import Answer, OscillatorParams
from ..core.states import FockVector, normalize
from ..detectors.profiles import EnergyDetectionProfile

logger = logging.getLogger(__name__)

ZERO_PROBABILITY = 1e-14


@dataclass(frozen=True)
class EnergySelection:
    """
    Borel set X for the generalized energy.

    levels lists eigenvalue indices; with complement=True the set means every
    level *except* those listed. includes_h0 adds the no-registration outcome.
    """
    levels: FrozenSet[int] = frozenset()
    complement: bool = False
    includes_h0: bool = False

    def __post_init__(self):
        levels = frozenset(int(n) for n in self.levels)
        if any(n < 0 for n in levels):
            raise InvalidSelection(f"Level indices must be non-negative: {sorted(levels)}")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def of(cls, levels: Iterable[int], includes_h0: bool = False) -> "EnergySelection":
        return cls(levels=frozenset(levels), includes_h0=includes_h0)

    @classmethod
    def all_levels(cls, includes_h0: bool = False) -> "EnergySelection":
        return cls(levels=frozenset(), complement=True, includes_h0=includes_h0)

    def complement_selection(self) -> "EnergySelection":
        """The set R \\ X, which flips both the level set and h0 membership."""
        return EnergySelection(
            levels=self.levels,
            complement=not self.complement,
            includes_h0=not self.includes_h0,
        )

    def mask(self, n_max: int) -> np.ndarray:
        """Boolean membership of levels 0 .. n_max."""
        beyond = [n for n in self.levels if n > n_max]
        if beyond:
            raise IndexBeyondTruncation(f"Selection levels {sorted(beyond)} exceed N_max={n_max}")
        member = np.zeros(n_max + 1, dtype=bool)
        member[list(self.levels)] = True
        return ~member if self.complement else member


@dataclass(frozen=True, eq=False)
class EnergyEffect:
    """Diagonal effect T(X) as weights w_0 .. w_{N_max} in [0, 1]."""
    weights: np.ndarray
    includes_h0: bool

    def apply(self, state: FockVector) -> np.ndarray:
        return self.weights * state.amplitudes


def check_no_registration_value(h0: float, params: OscillatorParams, n_max: int):
    """Reject an h0 that coincides with one of E_0 .. E_{n_max}."""
    if not math.isfinite(h0):
        raise InvalidNoRegistrationValue(f"h0 must be finite, got {h0}")
    spacing = params.quantum
    index = h0 / spacing - 0.5
    nearest = round(index)
    if 0 <= nearest <= n_max and abs(index - nearest) < 1e-12:
        raise InvalidNoRegistrationValue(f"h0={h0} coincides with eigenvalue E_{nearest}")


def _check_level(state: FockVector, n: int):
    if n < 0 or n > state.n_max:
        raise IndexBeyondTruncation(f"Level {n} outside truncation 0..{state.n_max}")


def energy_effect(sel: EnergySelection, profile: EnergyDetectionProfile, n_max: int) -> EnergyEffect:
    """
    Diagonal weights of T_psi^H(X).

    Args:
        sel: Selection X
        profile: Energy detection profile
        n_max: Truncation index

    Returns:
        EnergyEffect with w_n = p(n) on X (h0 not in X), or 1 - p(n) off X (h0 in X)
    """
    p = profile.probabilities(n_max)
    member = sel.mask(n_max)
    if sel.includes_h0:
        weights = np.where(member, 1.0, 1.0 - p)
    else:
        weights = np.where(member, p, 0.0)
    return EnergyEffect(weights=weights, includes_h0=sel.includes_h0)


def conditional_prob_energy(state: FockVector, n: int) -> float:
    """Probability of E_n given detection, |c_n|^2."""
    _check_level(state, n)
    return float(state.probabilities[n])


def overall_prob_energy(state: FockVector, n: int, profile: EnergyDetectionProfile) -> float:
    """Overall probability of E_n, p(n) |c_n|^2."""
    _check_level(state, n)
    return profile(n) * float(state.probabilities[n])


def overall_probs_energy(state: FockVector, profile: EnergyDetectionProfile) -> np.ndarray:
    """Overall probabilities of E_0 .. E_{N_max} as an array."""
    return profile.probabilities(state.n_max) * state.probabilities


def no_detection_prob_energy(state: FockVector, profile: EnergyDetectionProfile) -> float:
    """Overall probability of the no-registration outcome h0."""
    p = profile.probabilities(state.n_max)
    return float(np.sum((1.0 - p) * state.probabilities))


def detection_probability_energy(state: FockVector, profile: EnergyDetectionProfile) -> float:
    """Probability that an energy measurement registers the particle at all."""
    return float(np.sum(overall_probs_energy(state, profile)))


def property_probability_energy(
    state: FockVector,
    sel: EnergySelection,
    profile: EnergyDetectionProfile,
) -> float:
    """
    Overall probability <psi|T(X)|psi> that the property (H0, X) is found.

    For X containing h0 the value is 1 minus the probability of R \\ X.
    """
    if sel.includes_h0:
        return 1.0 - property_probability_energy(state, sel.complement_selection(), profile)
    effect = energy_effect(sel, profile, state.n_max)
    return float(np.sum(effect.weights * state.probabilities))


def collapse_energy_outcome(state: FockVector, n: int) -> FockVector:
    """
    Post-measurement state after outcome E_n: the eigenstate phi_n (phase 0).

    Args:
        state: Pre-measurement state
        n: Observed level

    Returns:
        phi_n in the same truncation
    """
    if conditional_prob_energy(state, n) < ZERO_PROBABILITY:
        raise ZeroProbabilityOutcome(f"Outcome E_{n} has zero probability in this state")
    return FockVector.basis_state(n, state.params, state.n_max)


def collapse_energy_no_detection(state: FockVector, profile: EnergyDetectionProfile) -> FockVector:
    """
    Post-measurement state when the energy measurement does not detect the particle.

    c'_n is proportional to (1 - p(n)) c_n.
    """
    weighted = (1.0 - profile.probabilities(state.n_max)) * state.amplitudes
    denominator = float(np.sqrt(np.sum(np.abs(weighted) ** 2)))
    if denominator < ZERO_PROBABILITY:
        raise DetectionCertain("Detection is certain on the state's support; no-detection branch is empty")
    return FockVector(amplitudes=weighted / denominator, params=state.params, tail_mass=state.tail_mass)


def gpp_energy_property(
    state: FockVector,
    sel: EnergySelection,
    profile: EnergyDetectionProfile,
    answer: Answer,
) -> FockVector:
    """
    Generalized projection postulate for the property (H0, X).

    Args:
        state: Pre-measurement state
        sel: Selection X
        profile: Energy detection profile
        answer: YES applies T(X), NO applies T(R \\ X)

    Returns:
        Normalized post-measurement state
    """
    branch = sel if Answer(answer) is Answer.YES else sel.complement_selection()
    effect = energy_effect(branch, profile, state.n_max)
    weighted = effect.apply(state)
    if float(np.sum(np.abs(weighted) ** 2)) < ZERO_PROBABILITY ** 2:
        raise ZeroProbabilityOutcome(f"Answer {Answer(answer).value} has zero probability")
    return normalize(state.with_amplitudes(weighted))
