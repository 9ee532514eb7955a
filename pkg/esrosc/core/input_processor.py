"""
Input processing: state specifications and state files.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..formatters.state_formatter import StateFormatter
from .exceptions import ConfigError, ParseError
from .models import OscillatorParams
from .states import FockVector, GridWavefunction, equal_superposition, ground_state, normalize, position_to_fock

logger = logging.getLogger(__name__)

PRESETS = ("ground", "superposition", "level")


class InputProcessor:
    """Turn state specifications from a run config into normalized states."""

    @staticmethod
    def validate_local_path(path: str) -> Tuple[bool, Optional[Path], Optional[str]]:
        """
        Validate a local file path.

        Args:
            path: Path to validate

        Returns:
            Tuple of (is_valid, Path object or None, error message or None)
        """
        try:
            path_obj = Path(path).resolve()

            if not path_obj.is_file():
                return False, None, f"File does not exist: {path}"

            if not os.access(path_obj, os.R_OK):
                return False, None, f"File is not readable: {path}"

            return True, path_obj, None

        except OSError as e:
            return False, None, str(e)

    @staticmethod
    def read_text_file(file_path: Path) -> str:
        """Read a UTF-8 text file, raising ConfigError when it cannot be read."""
        try:
            return file_path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise ConfigError(f"Cannot read {file_path}: {e}")

    @staticmethod
    def _coefficient(raw: Any) -> complex:
        if isinstance(raw, bool):
            raise ParseError(f"Invalid coefficient {raw!r}")
        if isinstance(raw, (int, float)):
            return complex(raw)
        if isinstance(raw, (list, tuple)) and len(raw) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw
        ):
            return complex(raw[0], raw[1])
        raise ParseError(f"Coefficient must be a number or a [re, im] pair, got {raw!r}")

    def build_state(
        self,
        spec: Dict[str, Any],
        params: OscillatorParams,
        n_max: int,
        base_dir: Optional[Path] = None,
    ) -> FockVector:
        """
        Build the normalized initial state described by a config mapping.

        Args:
            spec: {"preset": ...}, {"coefficients": [...]} or {"csv": path}
            params: Oscillator parameters
            n_max: Truncation index
            base_dir: Directory relative CSV paths are resolved against

        Returns:
            Normalized FockVector truncated at n_max
        """
        if not isinstance(spec, dict):
            raise ConfigError(f"State spec must be an object, got {spec!r}")

        if "preset" in spec:
            preset = spec["preset"]
            if preset == "ground":
                return ground_state(params, n_max)
            if preset == "superposition":
                return equal_superposition([0, 1], params, n_max)
            if preset == "level":
                n = spec.get("n")
                if not isinstance(n, int) or isinstance(n, bool):
                    raise ConfigError(f"Preset 'level' needs an integer n, got {n!r}")
                return FockVector.basis_state(n, params, n_max)
            raise ConfigError(f"Unknown state preset '{preset}'; expected one of {', '.join(PRESETS)}")

        if "coefficients" in spec:
            raw = spec["coefficients"]
            if not isinstance(raw, list) or not raw:
                raise ConfigError("State coefficients must be a non-empty list")
            coeffs = np.array([self._coefficient(c) for c in raw], dtype=complex)
            state = FockVector.from_coefficients(coeffs, params, n_max)
            if state.tail_mass > 0:
                logger.warning(f"State truncated at N_max={n_max}; discarded mass {state.tail_mass:.3e}")
            return normalize(state)

        if "csv" in spec:
            path = Path(spec["csv"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            is_valid, path_obj, error = self.validate_local_path(str(path))
            if not is_valid:
                raise ConfigError(error)
            loaded = StateFormatter().parse(self.read_text_file(path_obj), params, n_max)
            if isinstance(loaded, GridWavefunction):
                loaded = position_to_fock(normalize(loaded), n_max)
            logger.info(f"Loaded initial state from {path_obj}")
            return normalize(loaded)

        raise ConfigError("State spec needs one of 'preset', 'coefficients' or 'csv'")
