"""
Monte Carlo simulation of idealized measurement sequences.

Outcomes are drawn from the overall probabilities, including the
no-registration outcome, and states are updated with the generalized
projection postulate between steps.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.basis import default_grid, energy_levels, integrate_cells
from ..core.exceptions import BinGapDetected, InvalidSelection
from ..core.models import Answer, Grid, MeasurementRecord, Observable
from ..core.states import (
    DEFAULT_N_MAX,
    FockVector,
    GridWavefunction,
    State,
    fidelity,
    fock_to_position,
    normalize,
    position_to_fock,
)
from ..detectors.profiles import DetectionProfile
from ..observables.energy import (
    EnergySelection,
    collapse_energy_no_detection,
    collapse_energy_outcome,
    gpp_energy_property,
    overall_probs_energy,
    property_probability_energy,
)
from ..observables.position import (
    IntervalUnion,
    collapse_position_no_detection,
    collapse_position_yes,
    gpp_position_property,
    overall_prob_position,
)

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "PCG64"
CHUNK_SIZE = 10_000
NO_REGISTRATION = "no_registration"

Seed = Union[int, np.random.SeedSequence, np.random.Generator]
Selection = Union[EnergySelection, IntervalUnion]


def make_rng(seed: Seed) -> np.random.Generator:
    """Generator over PCG64 for an integer seed or a spawned SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class MeasurementSpec:
    """
    One idealized measurement in a sequence.

    With a selection the measurement asks the yes/no property (A0, X).
    Without one it registers a full outcome: an energy level, or one of the
    position bins.
    """
    observable: Observable
    profile: DetectionProfile
    selection: Optional[Selection] = None
    bins: Tuple[IntervalUnion, ...] = ()
    no_registration_value: float = 0.0

    def __post_init__(self):
        observable = Observable(self.observable)
        object.__setattr__(self, "observable", observable)
        if self.profile.observable is not observable:
            raise InvalidSelection(
                f"{self.profile.observable.value} profile used for a {observable.value} measurement"
            )
        expected = EnergySelection if observable is Observable.ENERGY else IntervalUnion
        if self.selection is not None and not isinstance(self.selection, expected):
            raise InvalidSelection(f"{observable.value} measurements need an {expected.__name__} selection")
        if observable is Observable.POSITION and self.selection is None:
            if not self.bins:
                object.__setattr__(self, "bins", IntervalUnion.partition([]))
            if any(b.includes_q0 for b in self.bins):
                raise InvalidSelection("Position bins must not contain q0")

    @property
    def is_property(self) -> bool:
        return self.selection is not None

    @classmethod
    def with_bin_edges(cls, profile: DetectionProfile, edges: Sequence[float], q0: float = 0.0) -> "MeasurementSpec":
        """Position measurement over the partition defined by sorted edges."""
        return cls(
            observable=Observable.POSITION,
            profile=profile,
            bins=IntervalUnion.partition(edges),
            no_registration_value=q0,
        )


@dataclass
class OutcomeDistribution:
    """Labelled outcomes with their analytic overall probabilities."""
    labels: List[str]
    values: List[float]
    probabilities: np.ndarray

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.probabilities)

    def draw(self, rng: np.random.Generator, size: Optional[int] = None):
        """Inverse-CDF draw of outcome indices."""
        cdf = self.cumulative()
        u = rng.random(size) * cdf[-1]
        return np.searchsorted(cdf, u, side="right")

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.labels, (float(p) for p in self.probabilities)))


@dataclass
class EmpiricalDistribution:
    """Outcome counts of repeated single-shot measurements."""
    labels: List[str]
    counts: np.ndarray
    trials: int
    seed: int
    algorithm: str = RNG_ALGORITHM

    @property
    def frequencies(self) -> Dict[str, float]:
        return {label: int(c) / self.trials for label, c in zip(self.labels, self.counts)}

    def frequency(self, label: str) -> float:
        return self.frequencies.get(label, 0.0)


def _grid_for(state: State, grid: Optional[Grid]) -> Grid:
    if grid is not None:
        return grid
    if isinstance(state, GridWavefunction):
        return state.grid
    return default_grid(state.n_max, state.params)


def _in_representation(state: State, observable: Observable, grid: Grid, n_max: int) -> State:
    if observable is Observable.ENERGY and isinstance(state, GridWavefunction):
        # sharp position collapses leave a tail outside the basis; keep the retained part
        return normalize(position_to_fock(state, n_max, strict=False))
    if observable is Observable.POSITION and isinstance(state, FockVector):
        return fock_to_position(state, grid)
    return state


def _bin_cells(bins: Sequence[IntervalUnion], grid: Grid) -> List[np.ndarray]:
    """Cell masks per bin, first match wins; raises when a cell is left uncovered."""
    taken = np.zeros(grid.point_count - 1, dtype=bool)
    masks = []
    for b in bins:
        mask = b.cell_mask(grid) & ~taken
        taken |= mask
        masks.append(mask)
    if not np.all(taken):
        gap = int(np.flatnonzero(~taken)[0])
        raise BinGapDetected(
            f"Position bins leave the grid uncovered near q={float(grid.points[gap]):.6g}"
        )
    return masks


def bin_value(b: IntervalUnion, grid: Grid) -> float:
    """Representative position of a bin: its midpoint, clipped to the grid."""
    if not b.intervals or b.complement:
        return math.nan
    lo = max(b.intervals[0][0], grid.q_min)
    hi = min(b.intervals[-1][1], grid.q_max)
    return 0.5 * (lo + hi)


def outcome_distribution(state: State, spec: MeasurementSpec, grid: Optional[Grid] = None) -> OutcomeDistribution:
    """
    Analytic distribution over the outcomes of one measurement.

    Args:
        state: Pre-measurement state
        spec: Measurement to perform
        grid: Grid for position measurements (default: the state's or the default grid)

    Returns:
        OutcomeDistribution, last entry being no-registration for full-outcome measurements
    """
    n_max = state.n_max if isinstance(state, FockVector) else DEFAULT_N_MAX
    grid = _grid_for(state, grid)
    state = _in_representation(state, spec.observable, grid, n_max)

    if spec.is_property:
        if spec.observable is Observable.ENERGY:
            yes = property_probability_energy(state, spec.selection, spec.profile)
        else:
            yes = overall_prob_position(state, spec.selection, spec.profile)
        yes = min(max(yes, 0.0), 1.0)
        return OutcomeDistribution(
            labels=[Answer.YES.value, Answer.NO.value],
            values=[1.0, 0.0],
            probabilities=np.array([yes, 1.0 - yes]),
        )

    if spec.observable is Observable.ENERGY:
        detected = overall_probs_energy(state, spec.profile)
        labels = [f"E_{n}" for n in range(state.n_max + 1)]
        values = energy_levels(state.n_max, state.params).tolist()
        no_reg = float(np.sum((1.0 - spec.profile.probabilities(state.n_max)) * state.probabilities))
    else:
        weighted = spec.profile.evaluate(grid.points) * state.density
        detected = np.array([
            float(integrate_cells(weighted, grid, mask)) for mask in _bin_cells(spec.bins, grid)
        ])
        labels = [f"bin_{k}" for k in range(len(spec.bins))]
        values = [bin_value(b, grid) for b in spec.bins]
        no_reg = max(1.0 - float(np.sum(detected)), 0.0)

    return OutcomeDistribution(
        labels=labels + [NO_REGISTRATION],
        values=values + [spec.no_registration_value],
        probabilities=np.append(np.clip(detected, 0.0, None), no_reg),
    )


def _collapse(state: State, spec: MeasurementSpec, index: int, label: str) -> State:
    if spec.is_property:
        gpp = gpp_energy_property if spec.observable is Observable.ENERGY else gpp_position_property
        return gpp(state, spec.selection, spec.profile, Answer(label))
    if label == NO_REGISTRATION:
        if spec.observable is Observable.ENERGY:
            return collapse_energy_no_detection(state, spec.profile)
        return collapse_position_no_detection(state, spec.profile)
    if spec.observable is Observable.ENERGY:
        return collapse_energy_outcome(state, index)
    return collapse_position_yes(state, spec.bins[index], spec.profile)


def measure(
    state: State,
    spec: MeasurementSpec,
    rng: np.random.Generator,
    step: int = 0,
    initial: Optional[State] = None,
    grid: Optional[Grid] = None,
    n_max: Optional[int] = None,
) -> MeasurementRecord:
    """
    Draw one outcome and apply the matching state update.

    Args:
        state: Pre-measurement state
        spec: Measurement to perform
        rng: Random generator
        step: Position of the measurement in its sequence
        initial: State fidelities are reported against (default: state)
        grid: Grid for position measurements
        n_max: Truncation used when a grid state is measured in energy

    Returns:
        MeasurementRecord holding the post-measurement state
    """
    grid = _grid_for(state, grid)
    if n_max is None:
        n_max = state.n_max if isinstance(state, FockVector) else DEFAULT_N_MAX
    state = _in_representation(state, spec.observable, grid, n_max)
    dist = outcome_distribution(state, spec, grid)
    index = int(dist.draw(rng))
    label = dist.labels[index]
    post = _collapse(state, spec, index, label)
    return MeasurementRecord(
        step=step,
        observable=spec.observable,
        outcome_label=label,
        outcome_value=float(dist.values[index]),
        probability=float(dist.probabilities[index]),
        fidelity_to_initial=fidelity(initial if initial is not None else state, post),
        state=post,
    )


def sample_energy(state: FockVector, profile: DetectionProfile, seed: Seed, h0: float = 0.0) -> MeasurementRecord:
    """Single energy measurement: E_n with p(n)|c_n|^2, else no-registration."""
    spec = MeasurementSpec(observable=Observable.ENERGY, profile=profile, no_registration_value=h0)
    return measure(state, spec, make_rng(seed))


def sample_position(
    state: GridWavefunction,
    bins: Sequence[IntervalUnion],
    profile: DetectionProfile,
    seed: Seed,
    q0: float = 0.0,
) -> MeasurementRecord:
    """Single position measurement over bins; bins must cover the whole grid."""
    spec = MeasurementSpec(
        observable=Observable.POSITION, profile=profile, bins=tuple(bins), no_registration_value=q0
    )
    return measure(state, spec, make_rng(seed))


def sample_property(state: State, spec: MeasurementSpec, seed: Seed) -> MeasurementRecord:
    """Single yes/no measurement of the property (A0, X)."""
    if not spec.is_property:
        raise InvalidSelection("Property measurements need a selection")
    return measure(state, spec, make_rng(seed))


def run_sequence(
    initial: State,
    specs: Sequence[MeasurementSpec],
    seed: Seed,
    grid: Optional[Grid] = None,
) -> List[MeasurementRecord]:
    """
    Run an ordered sequence of measurements on one physical object.

    Args:
        initial: Initial state
        specs: Measurements in order (non-empty)
        seed: Integer seed, SeedSequence or Generator
        grid: Grid for position steps (default: derived from the initial state)

    Returns:
        One MeasurementRecord per step
    """
    if not specs:
        raise InvalidSelection("A measurement sequence needs at least one step")
    rng = make_rng(seed)
    grid = _grid_for(initial, grid)
    n_max = initial.n_max if isinstance(initial, FockVector) else DEFAULT_N_MAX

    records = []
    state = initial
    for step, spec in enumerate(specs):
        record = measure(state, spec, rng, step=step, initial=initial, grid=grid, n_max=n_max)
        logger.debug(f"Step {step}: {spec.observable.value} -> {record.outcome_label}")
        records.append(record)
        state = record.state
    return records


def _count_chunk(dist: OutcomeDistribution, seed_seq: np.random.SeedSequence, size: int) -> np.ndarray:
    indices = dist.draw(make_rng(seed_seq), size)
    return np.bincount(indices, minlength=len(dist.labels))


def empirical_distribution(
    initial: State,
    spec: MeasurementSpec,
    trials: int,
    seed: int,
    workers: int = 1,
    grid: Optional[Grid] = None,
) -> EmpiricalDistribution:
    """
    Outcome frequencies of a single measurement repeated on fresh copies of a state.

    Draws run in fixed chunks with seeds spawned from one SeedSequence, so the
    counts depend only on seed and trials, never on the worker count.

    Args:
        initial: State every trial starts from
        spec: Measurement to repeat
        trials: Number of trials (>= 1)
        seed: 64-bit seed
        workers: Thread count for chunk evaluation
        grid: Grid for position measurements

    Returns:
        EmpiricalDistribution with counts per outcome label
    """
    if trials < 1:
        raise InvalidSelection(f"trials must be at least 1, got {trials}")
    dist = outcome_distribution(initial, spec, grid)
    sizes = [CHUNK_SIZE] * (trials // CHUNK_SIZE)
    if trials % CHUNK_SIZE:
        sizes.append(trials % CHUNK_SIZE)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    counts = np.zeros(len(dist.labels), dtype=np.int64)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {
                executor.submit(_count_chunk, dist, s, n): i
                for i, (s, n) in enumerate(zip(seeds, sizes))
            }
            for future in as_completed(futures):
                counts += future.result()
    else:
        for s, n in zip(seeds, sizes):
            counts += _count_chunk(dist, s, n)

    logger.info(f"Sampled {trials} trials in {len(sizes)} chunks")
    return EmpiricalDistribution(labels=dist.labels, counts=counts, trials=trials, seed=seed)


@dataclass
class Trajectory:
    """Records of one trial, tagged with its index."""
    trial: int
    records: List[MeasurementRecord] = field(default_factory=list)


def sample_trials(
    initial: State,
    specs: Sequence[MeasurementSpec],
    trials: int,
    seed: int,
    workers: int = 1,
    grid: Optional[Grid] = None,
) -> List[Trajectory]:
    """
    Independent measurement sequences, one per trial, ordered by trial index.

    Each trial gets its own seed spawned from SeedSequence(seed).
    """
    if trials < 1:
        raise InvalidSelection(f"trials must be at least 1, got {trials}")
    grid = _grid_for(initial, grid)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    results: Dict[int, Trajectory] = {}

    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {
                executor.submit(run_sequence, initial, specs, s, grid): i
                for i, s in enumerate(seeds)
            }
            for future in as_completed(futures):
                i = futures[future]
                results[i] = Trajectory(trial=i, records=future.result())
    else:
        for i, s in enumerate(seeds):
            results[i] = Trajectory(trial=i, records=run_sequence(initial, specs, s, grid))

    return [results[i] for i in range(trials)]
