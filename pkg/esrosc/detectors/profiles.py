"""
Detection-probability profiles for the generalized energy and position observables.

The model treats these functions as free parameters, so each profile is a small
immutable value built from a parametric family or a table and evaluated on
demand. Every evaluation is range-checked.
"""

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import OutOfRange, ParseError
from ..core.models import Observable

logger = logging.getLogger(__name__)

RANGE_SLACK = 1e-12


class ProfileKind(Enum):
    CONSTANT = "constant"
    TABLE = "table"
    GEOMETRIC = "geometric"
    GAUSSIAN_WINDOW = "gaussian-window"


KIND_ALIASES = {
    "geometric-decay": ProfileKind.GEOMETRIC,
    "piecewise-linear": ProfileKind.TABLE,
    "gaussian": ProfileKind.GAUSSIAN_WINDOW,
}


def _check_probability(name: str, value: float):
    if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
        raise OutOfRange(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class DetectionProfile:
    """Base class: an evaluator returning detection probabilities in [0, 1]."""
    kind: ProfileKind
    p: float = 1.0
    table: Tuple[Tuple[float, float], ...] = ()

    observable = None  # set by subclasses

    def _raw(self, points: np.ndarray) -> np.ndarray:
        if self.kind is ProfileKind.CONSTANT:
            return np.full(points.shape, float(self.p))
        if self.kind is ProfileKind.TABLE:
            xs, ps = zip(*self.table)
            return np.interp(points, xs, ps)
        raise OutOfRange(f"Profile kind {self.kind.value} not supported for {self.observable.value}")

    def evaluate(self, points) -> np.ndarray:
        """
        Detection probabilities at the given points.

        Args:
            points: Level indices (energy) or positions (position)

        Returns:
            Array of probabilities clipped to [0, 1]
        """
        values = self._raw(np.asarray(points, dtype=float))
        if np.any(values < -RANGE_SLACK) or np.any(values > 1.0 + RANGE_SLACK):
            raise OutOfRange(
                f"{self.kind.value} profile produced values in "
                f"[{float(np.min(values))}, {float(np.max(values))}]"
            )
        return np.clip(values, 0.0, 1.0)

    def __call__(self, point: float) -> float:
        return float(self.evaluate(np.asarray([point]))[0])

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "observable": self.observable.value}
        if self.kind is ProfileKind.CONSTANT:
            data["p"] = self.p
        elif self.kind is ProfileKind.TABLE:
            data["table"] = [list(pair) for pair in self.table]
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class EnergyDetectionProfile(DetectionProfile):
    """p_d(H, E_n) as a function of the level index n."""
    p0: float = 1.0
    ratio: float = 1.0

    observable = Observable.ENERGY

    def _raw(self, points: np.ndarray) -> np.ndarray:
        if self.kind is ProfileKind.GEOMETRIC:
            return self.p0 * np.power(self.ratio, points)
        return super()._raw(points)

    def probabilities(self, n_max: int) -> np.ndarray:
        """Detection probabilities p(0) .. p(n_max)."""
        return self.evaluate(np.arange(n_max + 1))

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        if self.kind is ProfileKind.GEOMETRIC:
            data.update(p0=self.p0, r=self.ratio)
        return data


@dataclass(frozen=True)
class PositionDetectionProfile(DetectionProfile):
    """p_d(Q, q) as a function of position."""
    p_max: float = 1.0
    center: float = 0.0
    width: float = 1.0

    observable = Observable.POSITION

    def _raw(self, points: np.ndarray) -> np.ndarray:
        if self.kind is ProfileKind.GAUSSIAN_WINDOW:
            return self.p_max * np.exp(-((points - self.center) ** 2) / (2.0 * self.width ** 2))
        return super()._raw(points)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        if self.kind is ProfileKind.GAUSSIAN_WINDOW:
            data.update(p_max=self.p_max, center=self.center, width=self.width)
        return data


PROFILE_TYPES = {
    Observable.ENERGY: EnergyDetectionProfile,
    Observable.POSITION: PositionDetectionProfile,
}


def make_constant_profile(p: float, observable: Observable = Observable.ENERGY) -> DetectionProfile:
    """
    Profile returning p everywhere; p = 1 recovers standard quantum mechanics.

    Args:
        p: Detection probability in [0, 1]
        observable: Which observable the profile belongs to

    Returns:
        Energy or position profile
    """
    _check_probability("p", p)
    return PROFILE_TYPES[Observable(observable)](kind=ProfileKind.CONSTANT, p=float(p))


def make_geometric_profile(p0: float, r: float) -> EnergyDetectionProfile:
    """
    Energy profile p(n) = p0 * r^n.

    Args:
        p0: Ground-level detection probability in [0, 1]
        r: Decay ratio in (0, 1]

    Returns:
        EnergyDetectionProfile
    """
    _check_probability("p0", p0)
    if not (isinstance(r, (int, float)) and 0.0 < r <= 1.0):
        raise OutOfRange(f"r must lie in (0, 1], got {r!r}")
    return EnergyDetectionProfile(kind=ProfileKind.GEOMETRIC, p0=float(p0), ratio=float(r))


def make_gaussian_window_profile(p_max: float, center: float, width: float) -> PositionDetectionProfile:
    """
    Position profile p(q) = p_max * exp(-(q - center)^2 / (2 width^2)).

    Args:
        p_max: Peak detection probability in [0, 1]
        center: Window center
        width: Window width (> 0)

    Returns:
        PositionDetectionProfile
    """
    _check_probability("p_max", p_max)
    if not (isinstance(width, (int, float)) and math.isfinite(width) and width > 0):
        raise OutOfRange(f"width must be positive, got {width!r}")
    if not (isinstance(center, (int, float)) and math.isfinite(center)):
        raise OutOfRange(f"center must be finite, got {center!r}")
    return PositionDetectionProfile(
        kind=ProfileKind.GAUSSIAN_WINDOW, p_max=float(p_max), center=float(center), width=float(width)
    )


def make_table_profile(
    table: Sequence[Sequence[float]],
    observable: Observable = Observable.ENERGY,
) -> DetectionProfile:
    """
    Piecewise-linear profile through (x, p) pairs, clamped outside the table domain.

    Args:
        table: Pairs [x, p] with strictly increasing x
        observable: Which observable the profile belongs to

    Returns:
        Energy or position profile
    """
    try:
        pairs = tuple((float(x), float(p)) for x, p in table)
    except (TypeError, ValueError) as e:
        raise ParseError(f"Table must be a list of [x, p] pairs: {e}")
    if not pairs:
        raise ParseError("Table profile needs at least one [x, p] pair")
    xs = [x for x, _ in pairs]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ParseError("Table abscissae must be strictly increasing")
    for x, p in pairs:
        _check_probability(f"p({x})", p)
    return PROFILE_TYPES[Observable(observable)](kind=ProfileKind.TABLE, table=pairs)


def _resolve_kind(raw: Any) -> ProfileKind:
    if not isinstance(raw, str):
        raise ParseError(f"Profile kind must be a string, got {raw!r}")
    key = raw.strip().lower()
    if key in KIND_ALIASES:
        return KIND_ALIASES[key]
    try:
        return ProfileKind(key)
    except ValueError:
        raise ParseError(f"Unknown profile kind: {raw}")


def profile_from_dict(data: Dict[str, Any], observable: Optional[Observable] = None) -> DetectionProfile:
    """
    Build a profile from a decoded config document.

    Args:
        data: Mapping with "kind" and kind-specific parameters
        observable: Target observable; falls back to data["observable"], then to the kind's natural one

    Returns:
        Detection profile
    """
    if not isinstance(data, dict):
        raise ParseError(f"Profile config must be an object, got {type(data).__name__}")
    kind = _resolve_kind(data.get("kind"))

    if observable is None and "observable" in data:
        try:
            observable = Observable(data["observable"])
        except ValueError:
            raise ParseError(f"Unknown observable: {data['observable']}")
    if observable is None:
        observable = Observable.POSITION if kind is ProfileKind.GAUSSIAN_WINDOW else Observable.ENERGY
    observable = Observable(observable)

    try:
        if kind is ProfileKind.CONSTANT:
            return make_constant_profile(data["p"], observable)
        if kind is ProfileKind.TABLE:
            return make_table_profile(data["table"], observable)
        if kind is ProfileKind.GEOMETRIC:
            if observable is not Observable.ENERGY:
                raise ParseError("Geometric profiles apply to the energy observable only")
            return make_geometric_profile(data["p0"], data["r"])
        if observable is not Observable.POSITION:
            raise ParseError("Gaussian-window profiles apply to the position observable only")
        return make_gaussian_window_profile(data["p_max"], data.get("center", 0.0), data["width"])
    except KeyError as e:
        raise ParseError(f"{kind.value} profile is missing parameter {e}")


def load_profile(text: str, observable: Optional[Observable] = None) -> DetectionProfile:
    """
    Parse a JSON profile document.

    Args:
        text: JSON text, e.g. {"kind": "geometric", "p0": 0.9, "r": 0.8}
        observable: Target observable (optional)

    Returns:
        Detection profile
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid profile JSON: {e}")
    profile = profile_from_dict(data, observable)
    logger.debug(f"Loaded {profile.observable.value} profile of kind {profile.kind.value}")
    return profile
