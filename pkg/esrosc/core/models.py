"""
Data models for the esrosc package.
"""

import logging
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .exceptions import InvalidRange, OutOfRange

logger = logging.getLogger(__name__)


class Observable(Enum):
    ENERGY = "energy"
    POSITION = "position"


class Answer(Enum):
    """Outcome of a yes/no property measurement."""
    YES = "yes"
    NO = "no"


class IntegrationMethod(Enum):
    TRAPEZOID = "trapezoid"
    SIMPSON = "simpson"


@dataclass(frozen=True)
class OscillatorParams:
    """Mass, angular frequency and reduced Planck constant of the oscillator."""
    mass: float = 1.0
    angular_frequency: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "angular_frequency", "hbar"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise OutOfRange(f"{name} must be a positive finite number, got {value!r}")

    @property
    def length_scale(self) -> float:
        """Characteristic length x_c = sqrt(hbar / (m omega))."""
        return math.sqrt(self.hbar / (self.mass * self.angular_frequency))

    @property
    def quantum(self) -> float:
        """Level spacing hbar * omega."""
        return self.hbar * self.angular_frequency


@dataclass(frozen=True)
class Grid:
    """Uniform position grid on [q_min, q_max]."""
    q_min: float
    q_max: float
    point_count: int

    def __post_init__(self):
        if not (math.isfinite(self.q_min) and math.isfinite(self.q_max)) or self.q_min >= self.q_max:
            raise InvalidRange(f"Grid needs q_min < q_max, got [{self.q_min}, {self.q_max}]")
        if self.point_count < 3:
            raise InvalidRange(f"Grid needs at least 3 points, got {self.point_count}")

    @property
    def spacing(self) -> float:
        return (self.q_max - self.q_min) / (self.point_count - 1)

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.linspace(self.q_min, self.q_max, self.point_count)
        pts.setflags(write=False)
        return pts


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-type quadrature nodes and positive weights."""
    nodes: Tuple[float, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise InvalidRange("Quadrature nodes and weights must have equal length")
        if any(w <= 0 for w in self.weights):
            raise OutOfRange("Quadrature weights must be positive")

    @property
    def order(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class MeasurementRecord:
    """One sampled measurement outcome together with the post-measurement state."""
    step: int
    observable: Observable
    outcome_label: str
    outcome_value: float
    probability: float
    fidelity_to_initial: float
    state: Any = field(repr=False, compare=False)

    @property
    def is_no_registration(self) -> bool:
        return self.outcome_label == "no_registration"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "observable": self.observable.value,
            "outcome_label": self.outcome_label,
            "outcome_value": self.outcome_value,
            "probability": self.probability,
            "fidelity_to_initial": self.fidelity_to_initial,
        }


@dataclass
class RunConfig:
    """Configuration for a single esr-osc run."""
    mass: float = 1.0
    angular_frequency: float = 1.0
    hbar: float = 1.0
    n_max: int = 64
    grid_points: int = 4001
    grid_half_width: Optional[float] = None  # in characteristic lengths; None applies the default rule
    integration: str = "simpson"  # rule for integrals over position selections
    h0: float = 0.0
    q0: float = 0.0
    state: Dict[str, Any] = field(default_factory=lambda: {"preset": "ground"})
    energy_profile: Dict[str, Any] = field(default_factory=lambda: {"kind": "constant", "p": 1.0})
    position_profile: Dict[str, Any] = field(default_factory=lambda: {"kind": "constant", "p": 1.0})
    position_bin_edges: List[float] = field(default_factory=lambda: [0.0])
    collapse: Dict[str, Any] = field(default_factory=lambda: {
        "observable": "energy",
        "branch": "no_detection",
    })
    measurements: List[Dict[str, Any]] = field(default_factory=lambda: [
        {"observable": "energy"},
    ])
    trials: int = 100
    seed: int = 0
    thread_count: int = 4
    verbose: bool = False
    debug: bool = False

    def apply_environment(self):
        """Cap the worker count with ESR_OSC_THREADS when it is set."""
        cap = os.environ.get("ESR_OSC_THREADS")
        if cap:
            try:
                self.thread_count = max(1, min(self.thread_count, int(cap)))
            except ValueError:
                logger.warning(f"Ignoring ESR_OSC_THREADS={cap!r}: not an integer")

    def oscillator_params(self) -> OscillatorParams:
        return OscillatorParams(
            mass=self.mass,
            angular_frequency=self.angular_frequency,
            hbar=self.hbar,
        )


@dataclass
class ProbabilityRow:
    """One line of the probability table; None marks a quantity undefined for the outcome."""
    observable: Observable
    outcome: str
    value: Optional[float]
    conditional: Optional[float]
    detection: Optional[float]
    overall: float
    detection_derived: bool = False  # detection computed as overall / conditional

    @property
    def identity_residual(self) -> Optional[float]:
        """overall - detection * conditional, where both factors are independently defined."""
        if self.conditional is None or self.detection is None or self.detection_derived:
            return None
        return self.overall - self.detection * self.conditional


@dataclass
class ComparisonRow:
    """Standard quantum prediction next to the ESR prediction for one outcome or quantity."""
    observable: str
    outcome: str
    qm: Optional[float]
    esr: float

    @property
    def difference(self) -> Optional[float]:
        return None if self.qm is None else self.esr - self.qm

    @property
    def abs_difference(self) -> Optional[float]:
        diff = self.difference
        return None if diff is None else abs(diff)
