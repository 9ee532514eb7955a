"""Pytest configuration for esrosc."""

import sys
from pathlib import Path

import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from esrosc.core.models import OscillatorParams  # noqa: E402


@pytest.fixture
def params():
    """Oscillator with hbar = m = omega = 1."""
    return OscillatorParams()
