"""
Pure-state representations in the truncated Fock basis and on the position grid.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .basis import hermite_functions, integrate_grid
from .exceptions import (
    GridTooSmall,
    IndexBeyondTruncation,
    RepresentationMismatch,
    TruncationLoss,
    ZeroNorm,
)
from .models import Grid, OscillatorParams

logger = logging.getLogger(__name__)

DEFAULT_N_MAX = 64
ZERO_NORM = 1e-14
GRID_NORM_TOLERANCE = 1e-3
TRUNCATION_TOLERANCE = 1e-3


@dataclass(frozen=True, eq=False)
class FockVector:
    """
    Amplitudes c_0 .. c_{N_max} of a pure state in the energy eigenbasis.

    tail_mass is the squared norm discarded when the state was truncated,
    relative to the norm of the untruncated input.
    """
    amplitudes: np.ndarray
    params: OscillatorParams
    tail_mass: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities)))

    def amplitude(self, n: int) -> complex:
        if n < 0 or n > self.n_max:
            raise IndexBeyondTruncation(f"Level {n} outside truncation 0..{self.n_max}")
        return complex(self.amplitudes[n])

    def with_amplitudes(self, amplitudes: np.ndarray) -> "FockVector":
        return replace(self, amplitudes=amplitudes)

    @classmethod
    def from_coefficients(
        cls,
        coefficients: Sequence[complex],
        params: OscillatorParams,
        n_max: Optional[int] = None,
    ) -> "FockVector":
        """
        Build a Fock vector from coefficients, truncating or zero-padding to n_max.

        Args:
            coefficients: Amplitudes c_0, c_1, ...
            params: Oscillator parameters
            n_max: Truncation index (defaults to len(coefficients) - 1)

        Returns:
            FockVector with the discarded tail mass recorded
        """
        coeffs = np.asarray(coefficients, dtype=complex).reshape(-1)
        if n_max is None:
            n_max = coeffs.shape[0] - 1
        if n_max < 0:
            raise IndexBeyondTruncation("A Fock vector needs at least one level")

        total = float(np.sum(np.abs(coeffs) ** 2))
        kept = np.zeros(n_max + 1, dtype=complex)
        count = min(n_max + 1, coeffs.shape[0])
        kept[:count] = coeffs[:count]
        tail = float(np.sum(np.abs(coeffs[count:]) ** 2))
        tail_mass = tail / total if total > 0 else 0.0
        if tail_mass > 0:
            logger.debug(f"Truncating to N_max={n_max} discards mass {tail_mass:.3e}")
        return cls(amplitudes=kept, params=params, tail_mass=tail_mass)

    @classmethod
    def basis_state(cls, n: int, params: OscillatorParams, n_max: int = DEFAULT_N_MAX) -> "FockVector":
        """Eigenstate phi_n in a basis truncated at n_max."""
        if n < 0 or n > n_max:
            raise IndexBeyondTruncation(f"Level {n} outside truncation 0..{n_max}")
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[n] = 1.0
        return cls(amplitudes=amps, params=params)


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    """Samples psi(q_i) of a pure state on a uniform position grid."""
    samples: np.ndarray
    grid: Grid
    params: OscillatorParams

    def __post_init__(self):
        values = np.array(self.samples, dtype=complex).reshape(-1)
        if values.shape[0] != self.grid.point_count:
            raise RepresentationMismatch(
                f"Wavefunction has {values.shape[0]} samples for a {self.grid.point_count}-point grid"
            )
        values.setflags(write=False)
        object.__setattr__(self, "samples", values)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def norm(self) -> float:
        return math.sqrt(max(integrate_grid(self.density, self.grid), 0.0))

    def with_samples(self, samples: np.ndarray) -> "GridWavefunction":
        return replace(self, samples=samples)


State = Union[FockVector, GridWavefunction]


def fock_to_position(state: FockVector, grid: Grid) -> GridWavefunction:
    """
    Evaluate psi(q_i) = sum_n c_n phi_n(q_i) on a grid.

    Args:
        state: Normalized Fock vector
        grid: Target grid

    Returns:
        GridWavefunction on grid
    """
    table = hermite_functions(state.n_max, grid.points, state.params)
    wf = GridWavefunction(samples=state.amplitudes @ table, grid=grid, params=state.params)

    expected = state.norm()
    deviation = abs(wf.norm() - expected)
    if deviation > GRID_NORM_TOLERANCE:
        raise GridTooSmall(
            f"Grid [{grid.q_min}, {grid.q_max}] holds norm {wf.norm():.6f} of {expected:.6f}; widen or refine it"
        )
    return wf


def position_to_fock(wf: GridWavefunction, n_max: int = DEFAULT_N_MAX, strict: bool = True) -> FockVector:
    """
    Project a grid wavefunction onto phi_0 .. phi_{n_max}: c_n = int phi_n psi dq.

    Args:
        wf: Normalized grid wavefunction
        n_max: Truncation index
        strict: Raise TruncationLoss when the basis misses more than 1e-3 of the norm;
            otherwise log a warning and keep the truncated amplitudes

    Returns:
        FockVector with tail mass 1 - sum |c_n|^2 recorded
    """
    table = hermite_functions(n_max, wf.grid.points, wf.params)
    coeffs = np.array([integrate_grid(row * wf.samples, wf.grid) for row in table], dtype=complex)
    kept = float(np.sum(np.abs(coeffs) ** 2))
    total = wf.norm() ** 2
    if kept < total - TRUNCATION_TOLERANCE:
        message = f"Basis up to N_max={n_max} retains only {kept:.6f} of norm {total:.6f}"
        if strict:
            raise TruncationLoss(message)
        logger.warning(message)
    tail_mass = max(total - kept, 0.0)
    return FockVector(amplitudes=coeffs, params=wf.params, tail_mass=tail_mass)


def _check_compatible(a: State, b: State):
    if type(a) is not type(b):
        raise RepresentationMismatch(
            f"Cannot combine {type(a).__name__} with {type(b).__name__}"
        )
    if a.params != b.params:
        raise RepresentationMismatch("States belong to different oscillators")
    if isinstance(a, FockVector) and a.n_max != b.n_max:
        raise RepresentationMismatch(f"Truncations differ: {a.n_max} vs {b.n_max}")
    if isinstance(a, GridWavefunction) and a.grid != b.grid:
        raise RepresentationMismatch("States live on different grids")


def inner_product(a: State, b: State) -> complex:
    """
    <a|b>, conjugate-linear in the first argument.

    Args:
        a: Bra state
        b: Ket state (same representation as a)

    Returns:
        Complex inner product
    """
    _check_compatible(a, b)
    if isinstance(a, FockVector):
        return complex(np.vdot(a.amplitudes, b.amplitudes))
    return complex(integrate_grid(np.conj(a.samples) * b.samples, a.grid))


def normalize(state: State) -> State:
    """Return the state scaled to unit norm."""
    norm = state.norm()
    if norm < ZERO_NORM:
        raise ZeroNorm(f"Cannot normalize a state of norm {norm:.3e}")
    if isinstance(state, FockVector):
        return state.with_amplitudes(state.amplitudes / norm)
    return state.with_samples(state.samples / norm)


def fidelity(a: State, b: State) -> float:
    """
    |<a|b>| for unit states, with Fock vectors evaluated on the grid when mixed.

    Global phases cancel, so states equal up to phase have fidelity 1.
    """
    if isinstance(a, FockVector) and isinstance(b, GridWavefunction):
        a = fock_to_position(a, b.grid)
    elif isinstance(a, GridWavefunction) and isinstance(b, FockVector):
        b = fock_to_position(b, a.grid)
    return abs(inner_product(a, b))


def ground_state(params: OscillatorParams, n_max: int = DEFAULT_N_MAX) -> FockVector:
    return FockVector.basis_state(0, params, n_max)


def equal_superposition(levels: Sequence[int], params: OscillatorParams, n_max: int = DEFAULT_N_MAX) -> FockVector:
    """Normalized equal-weight superposition of the given levels."""
    amps = np.zeros(n_max + 1, dtype=complex)
    for n in levels:
        if n < 0 or n > n_max:
            raise IndexBeyondTruncation(f"Level {n} outside truncation 0..{n_max}")
        amps[n] = 1.0
    return normalize(FockVector(amplitudes=amps, params=params))
