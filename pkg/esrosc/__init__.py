"""
esrosc: ESR-model generalized observables for the quantum harmonic oscillator.
"""

__version__ = "0.1.0"

from .core.simulator import ESRSimulator
from .core.models import (
    Grid,
    MeasurementRecord,
    Observable,
    OscillatorParams,
    RunConfig,
)
from .core.states import FockVector, GridWavefunction

__all__ = [
    "ESRSimulator",
    "FockVector",
    "Grid",
    "GridWavefunction",
    "MeasurementRecord",
    "Observable",
    "OscillatorParams",
    "RunConfig",
]
