"""
Main simulator class tying a run configuration to the observable modules and formatters.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from .basis import default_grid, energy_eigenvalue
from .exceptions import ConfigError, DetectionCertain
from .input_processor import InputProcessor
from .models import (
    Answer,
    ComparisonRow,
    Grid,
    Observable,
    OscillatorParams,
    ProbabilityRow,
    RunConfig,
)
from .states import FockVector, GridWavefunction, State, fidelity, fock_to_position
from ..detectors.profiles import EnergyDetectionProfile, PositionDetectionProfile, profile_from_dict
from ..observables.energy import (
    check_no_registration_value,
    collapse_energy_no_detection,
    collapse_energy_outcome,
    conditional_prob_energy,
    detection_probability_energy,
    gpp_energy_property,
    no_detection_prob_energy,
    overall_prob_energy,
)
from ..observables.expectations import ExpectationReport, expectation_report
from ..observables.position import (
    IntervalUnion,
    collapse_position_no_detection,
    collapse_position_no_detection_fock,
    collapse_position_yes,
    conditional_prob_position,
    detection_probability_position,
    gpp_position_property,
    no_detection_prob_position,
    overall_prob_position,
)
from ..sampling.sampler import MeasurementSpec, Trajectory, bin_value, sample_trials
from ..utils.config_loader import parse_bin_edges, parse_selection

logger = logging.getLogger(__name__)

COLLAPSE_BRANCHES = ("outcome", "no_detection", "yes", "no")


class ESRSimulator:
    """
    Evaluate ESR predictions for the oscillator described by a RunConfig.

    Everything derived from the config (grid, profiles, initial state) is
    built lazily on first use.
    """

    def __init__(self, config: Optional[RunConfig] = None, base_dir: Optional[Path] = None):
        """
        Initialize the simulator.

        Args:
            config: Run configuration
            base_dir: Directory relative paths in the config are resolved against
        """
        self.config = config or RunConfig()
        self.config.apply_environment()
        self.base_dir = base_dir
        self.input_processor = InputProcessor()

        self._params = None
        self._grid = None
        self._energy_profile = None
        self._position_profile = None
        self._initial_state = None
        self._initial_wavefunction = None

    @property
    def params(self) -> OscillatorParams:
        if self._params is None:
            self._params = self.config.oscillator_params()
        return self._params

    @property
    def grid(self) -> Grid:
        if self._grid is None:
            self._grid = default_grid(
                self.config.n_max,
                self.params,
                point_count=self.config.grid_points,
                half_width=self.config.grid_half_width,
            )
        return self._grid

    @property
    def energy_profile(self) -> EnergyDetectionProfile:
        if self._energy_profile is None:
            self._energy_profile = profile_from_dict(self.config.energy_profile, Observable.ENERGY)
        return self._energy_profile

    @property
    def position_profile(self) -> PositionDetectionProfile:
        if self._position_profile is None:
            self._position_profile = profile_from_dict(self.config.position_profile, Observable.POSITION)
        return self._position_profile

    @property
    def initial_state(self) -> FockVector:
        """Normalized initial state in the Fock basis."""
        if self._initial_state is None:
            check_no_registration_value(self.config.h0, self.params, self.config.n_max)
            self._initial_state = self.input_processor.build_state(
                self.config.state, self.params, self.config.n_max, self.base_dir
            )
            logger.info(f"Initial state built with N_max={self.config.n_max}")
        return self._initial_state

    @property
    def initial_wavefunction(self) -> GridWavefunction:
        """Initial state sampled on the grid."""
        if self._initial_wavefunction is None:
            self._initial_wavefunction = fock_to_position(self.initial_state, self.grid)
        return self._initial_wavefunction

    @property
    def bins(self) -> List[IntervalUnion]:
        edges = parse_bin_edges(self.config.position_bin_edges, "position_bin_edges")
        return list(IntervalUnion.partition(edges))

    def probability_rows(self) -> List[ProbabilityRow]:
        """
        Conditional, detection and overall probabilities for both observables.

        Energy rows cover the levels with non-zero amplitude; position rows
        cover the configured bins. For bins the detection column holds the
        bin-averaged detection probability overall / conditional.

        Returns:
            Rows in output order
        """
        state, wf = self.initial_state, self.initial_wavefunction
        e_profile, q_profile = self.energy_profile, self.position_profile
        method = self.config.integration
        rows = []

        for n in range(state.n_max + 1):
            conditional = conditional_prob_energy(state, n)
            if conditional == 0.0:
                continue
            rows.append(ProbabilityRow(
                observable=Observable.ENERGY,
                outcome=f"E_{n}",
                value=energy_eigenvalue(n, self.params),
                conditional=conditional,
                detection=e_profile(n),
                overall=overall_prob_energy(state, n, e_profile),
            ))
        rows.append(ProbabilityRow(
            Observable.ENERGY, "no_registration", float(self.config.h0), None, None,
            no_detection_prob_energy(state, e_profile),
        ))
        rows.append(ProbabilityRow(
            Observable.ENERGY, "detected", None, None, None,
            detection_probability_energy(state, e_profile),
        ))

        for k, b in enumerate(self.bins):
            conditional = conditional_prob_position(wf, b, method)
            overall = overall_prob_position(wf, b, q_profile, method)
            rows.append(ProbabilityRow(
                observable=Observable.POSITION,
                outcome=f"bin_{k}",
                value=bin_value(b, self.grid),
                conditional=conditional,
                detection=overall / conditional if conditional > 1e-14 else None,
                overall=overall,
                detection_derived=True,
            ))
        rows.append(ProbabilityRow(
            Observable.POSITION, "no_registration", float(self.config.q0), None, None,
            no_detection_prob_position(wf, q_profile),
        ))
        rows.append(ProbabilityRow(
            Observable.POSITION, "detected", None, None, None,
            detection_probability_position(wf, q_profile),
        ))
        return rows

    def expectation_report(self) -> ExpectationReport:
        return expectation_report(
            self.initial_state,
            self.initial_wavefunction,
            self.energy_profile,
            self.position_profile,
            h0=self.config.h0,
            q0=self.config.q0,
        )

    def no_detection_fidelity(self) -> Optional[float]:
        """Fidelity between the energy and position no-detection post-states, None if either is empty."""
        try:
            energy_post = collapse_energy_no_detection(self.initial_state, self.energy_profile)
            position_post = collapse_position_no_detection(self.initial_wavefunction, self.position_profile)
        except DetectionCertain as e:
            logger.info(f"No-detection fidelity skipped: {e}")
            return None
        return fidelity(energy_post, position_post)

    def comparison_rows(self) -> List[ComparisonRow]:
        """
        Standard quantum predictions beside the ESR ones.

        Returns:
            Rows for every probability outcome, the two expectation values and
            the no-detection fidelity
        """
        rows = []
        for row in self.probability_rows():
            if row.outcome == "detected":
                continue
            qm = 0.0 if row.conditional is None else row.conditional
            rows.append(ComparisonRow(row.observable.value, row.outcome, qm, row.overall))

        report = self.expectation_report()
        rows.append(ComparisonRow(Observable.ENERGY.value, "<H>", report.H, report.H0))
        rows.append(ComparisonRow(Observable.POSITION.value, "<Q>", report.Q, report.Q0))

        fid = self.no_detection_fidelity()
        if fid is not None:
            rows.append(ComparisonRow("energy|position", "no_detection_fidelity", None, fid))
        return rows

    def _selection(self, observable: Observable, data: Optional[Dict[str, Any]], required: bool = False):
        selection = parse_selection(observable, data)
        if required and selection is None:
            raise ConfigError(f"{observable.value} branch needs a 'selection'")
        return selection

    def collapse(self) -> State:
        """
        Post-measurement state for the branch named in config.collapse.

        Returns:
            FockVector for energy branches and Fock-basis position no-detection,
            GridWavefunction otherwise
        """
        spec = self.config.collapse
        try:
            observable = Observable(spec.get("observable", "energy"))
        except ValueError:
            raise ConfigError(f"Unknown collapse observable: {spec.get('observable')}")
        branch = spec.get("branch", "no_detection")
        if branch not in COLLAPSE_BRANCHES:
            raise ConfigError(f"Unknown collapse branch '{branch}'; expected one of {', '.join(COLLAPSE_BRANCHES)}")
        logger.info(f"Collapsing on the {observable.value} {branch} branch")

        if observable is Observable.ENERGY:
            state, profile = self.initial_state, self.energy_profile
            if branch == "outcome":
                level = spec.get("level")
                if not isinstance(level, int) or isinstance(level, bool):
                    raise ConfigError(f"Energy outcome collapse needs an integer 'level', got {level!r}")
                return collapse_energy_outcome(state, level)
            if branch == "no_detection":
                return collapse_energy_no_detection(state, profile)
            selection = self._selection(observable, spec.get("selection"), required=True)
            return gpp_energy_property(state, selection, profile, Answer(branch))

        profile = self.position_profile
        if branch == "no_detection":
            if spec.get("representation", "grid") == "fock":
                return collapse_position_no_detection_fock(self.initial_state, profile)
            return collapse_position_no_detection(self.initial_wavefunction, profile)
        selection = self._selection(observable, spec.get("selection"), required=True)
        if branch == "outcome":
            return collapse_position_yes(self.initial_wavefunction, selection, profile)
        return gpp_position_property(self.initial_wavefunction, selection, profile, Answer(branch))

    def measurement_specs(self) -> List[MeasurementSpec]:
        """Measurement sequence from config.measurements."""
        specs = []
        for i, item in enumerate(self.config.measurements):
            if not isinstance(item, dict):
                raise ConfigError(f"Measurement {i} must be an object, got {item!r}")
            try:
                observable = Observable(item.get("observable"))
            except ValueError:
                raise ConfigError(f"Measurement {i} has unknown observable {item.get('observable')!r}")
            selection = self._selection(observable, item.get("selection"))
            if observable is Observable.ENERGY:
                specs.append(MeasurementSpec(
                    observable=observable,
                    profile=self.energy_profile,
                    selection=selection,
                    no_registration_value=self.config.h0,
                ))
                continue
            edges = parse_bin_edges(
                item.get("bin_edges", self.config.position_bin_edges), f"measurement {i} bin_edges"
            )
            specs.append(MeasurementSpec(
                observable=observable,
                profile=self.position_profile,
                selection=selection,
                bins=IntervalUnion.partition(edges) if selection is None else (),
                no_registration_value=self.config.q0,
            ))
        if not specs:
            raise ConfigError("Config lists no measurements to sample")
        return specs

    def trajectories(self, seed: Optional[int] = None) -> List[Trajectory]:
        seed = self.config.seed if seed is None else seed
        specs = self.measurement_specs()
        logger.info(f"Sampling {self.config.trials} trials of {len(specs)} steps with seed {seed}")
        return sample_trials(
            self.initial_state,
            specs,
            self.config.trials,
            seed,
            workers=self.config.thread_count,
            grid=self.grid,
        )

    def generate_probs(self) -> str:
        from ..formatters.table_formatter import ProbabilityTableFormatter
        return ProbabilityTableFormatter().format(self.probability_rows())

    def generate_expect(self) -> str:
        from ..formatters.table_formatter import ExpectationTableFormatter
        return ExpectationTableFormatter().format(self.expectation_report())

    def generate_compare(self, rows: Optional[List[ComparisonRow]] = None) -> str:
        from ..formatters.table_formatter import ComparisonTableFormatter
        return ComparisonTableFormatter().format(self.comparison_rows() if rows is None else rows)

    def generate_trajectories(self, seed: Optional[int] = None) -> str:
        from ..formatters.trajectory_formatter import TrajectoryFormatter
        seed = self.config.seed if seed is None else seed
        return TrajectoryFormatter().format(self.trajectories(seed), seed)

    def generate_state(self, state: State) -> str:
        from ..formatters.state_formatter import StateFormatter
        return StateFormatter().format(state)

    def grid_view(self, state: State) -> GridWavefunction:
        """Grid samples of a state, for the plot-ready companion file."""
        return state if isinstance(state, GridWavefunction) else fock_to_position(state, self.grid)
