"""
Trajectory CSV for sampled measurement sequences.
"""

from typing import List

from .. import __version__
from ..sampling.sampler import RNG_ALGORITHM, Trajectory
from .csv_writer import write_csv


class TrajectoryFormatter:
    """One row per (trial, step), preceded by run metadata comments."""

    HEADER = ["trial", "step", "observable", "outcome_label", "outcome_value", "probability_analytic"]

    def format(self, trajectories: List[Trajectory], seed: int) -> str:
        """
        Format sampled trajectories.

        Args:
            trajectories: Trajectories ordered by trial index
            seed: Seed the run was started from

        Returns:
            CSV text with metadata lines
        """
        comments = [
            f"esr-osc {__version__}",
            f"rng {RNG_ALGORITHM}",
            f"seed {seed}",
            f"trials {len(trajectories)}",
        ]
        rows = (
            [
                t.trial,
                r.step,
                r.observable.value,
                r.outcome_label,
                r.outcome_value,
                r.probability,
            ]
            for t in trajectories
            for r in t.records
        )
        return write_csv(self.HEADER, rows, comments)
