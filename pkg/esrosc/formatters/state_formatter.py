"""
State import and export as CSV.

Fock vectors use columns n,re,im; grid wavefunctions use q,re,im.
"""

import logging
from typing import Optional, Union

import numpy as np

from ..core.basis import build_grid
from ..core.exceptions import ParseError
from ..core.models import OscillatorParams
from ..core.states import FockVector, GridWavefunction
from .csv_writer import read_csv, write_csv

logger = logging.getLogger(__name__)

FOCK_HEADER = ["n", "re", "im"]
GRID_HEADER = ["q", "re", "im"]


class StateFormatter:
    """Write and read pure states in either representation."""

    def format(self, state: Union[FockVector, GridWavefunction]) -> str:
        """
        Format a state as CSV.

        Args:
            state: Fock vector or grid wavefunction

        Returns:
            CSV text
        """
        if isinstance(state, FockVector):
            rows = ([n, float(c.real), float(c.imag)] for n, c in enumerate(state.amplitudes))
            return write_csv(FOCK_HEADER, rows)
        rows = (
            [float(q), float(v.real), float(v.imag)]
            for q, v in zip(state.grid.points, state.samples)
        )
        return write_csv(GRID_HEADER, rows)

    def parse(
        self,
        text: str,
        params: Optional[OscillatorParams] = None,
        n_max: Optional[int] = None,
    ) -> Union[FockVector, GridWavefunction]:
        """
        Parse a state CSV written by format().

        Args:
            text: CSV text
            params: Oscillator parameters (default ħ = m = ω = 1)
            n_max: Truncation for Fock CSV input (default: highest listed n)

        Returns:
            FockVector or GridWavefunction, unnormalized
        """
        params = params or OscillatorParams()
        rows = read_csv(text)
        if not rows:
            raise ParseError("State CSV is empty")
        header, body = [h.strip() for h in rows[0]], rows[1:]
        if not body:
            raise ParseError("State CSV has no data rows")
        try:
            keys = [float(r[0]) for r in body]
            values = np.array([complex(float(r[1]), float(r[2])) for r in body])
        except (IndexError, ValueError) as e:
            raise ParseError(f"Malformed state CSV row: {e}")

        if header == FOCK_HEADER:
            levels = [int(k) for k in keys]
            if any(n < 0 for n in levels) or len(set(levels)) != len(levels):
                raise ParseError("Fock CSV levels must be distinct non-negative integers")
            amps = np.zeros(max(levels) + 1, dtype=complex)
            amps[levels] = values
            logger.debug(f"Parsed Fock state with {len(levels)} listed levels")
            return FockVector.from_coefficients(amps, params, n_max)

        if header == GRID_HEADER:
            q = np.array(keys)
            if q.shape[0] < 3:
                raise ParseError("Grid CSV needs at least 3 points")
            grid = build_grid(q[0], q[-1], q.shape[0])
            if not np.allclose(q, grid.points, rtol=0.0, atol=1e-9 * max(1.0, abs(grid.q_max))):
                raise ParseError("Grid CSV positions must be uniformly spaced")
            return GridWavefunction(samples=values, grid=grid, params=params)

        raise ParseError(f"Unknown state CSV header: {','.join(header)}")
