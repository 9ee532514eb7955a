"""
Run configuration loading from JSON or YAML documents.
"""

import json
import logging
import math
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from ..core.exceptions import ConfigError, InvalidSelection
from ..core.models import IntegrationMethod, Observable, RunConfig
from ..observables.energy import EnergySelection
from ..observables.position import IntervalUnion

logger = logging.getLogger(__name__)

YAML_SUFFIXES = {".yaml", ".yml"}

# expected types per field; ints are accepted where floats are
FIELD_TYPES = {
    "mass": (int, float),
    "angular_frequency": (int, float),
    "hbar": (int, float),
    "n_max": int,
    "grid_points": int,
    "grid_half_width": (int, float, type(None)),
    "integration": str,
    "h0": (int, float),
    "q0": (int, float),
    "state": dict,
    "energy_profile": dict,
    "position_profile": dict,
    "position_bin_edges": list,
    "collapse": dict,
    "measurements": list,
    "trials": int,
    "seed": int,
    "thread_count": int,
    "verbose": bool,
    "debug": bool,
}


class ConfigLoader:
    """Load and validate run configurations."""

    @staticmethod
    def load_from_file(config_path: str) -> RunConfig:
        """
        Load configuration from a JSON or YAML file.

        Args:
            config_path: Path to a .json, .yaml or .yml file

        Returns:
            RunConfig with loaded settings
        """
        path = Path(config_path)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"Configuration file not found: {config_path}")
        except OSError as e:
            raise ConfigError(f"Cannot read configuration file {config_path}: {e}")

        try:
            if path.suffix.lower() in YAML_SUFFIXES:
                data = yaml.safe_load(text)
            else:
                data = json.loads(text)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            logger.error(f"Error parsing configuration {config_path}: {e}")
            raise ConfigError(f"Malformed configuration {config_path}: {e}")

        logger.debug(f"Loaded configuration from {config_path}")
        return ConfigLoader.create_config(data or {})

    @staticmethod
    def create_config(data: Dict[str, Any]) -> RunConfig:
        """
        Create a RunConfig from a decoded document.

        Unknown keys are logged and ignored; known keys are type-checked.

        Args:
            data: Configuration mapping

        Returns:
            RunConfig
        """
        if not isinstance(data, dict):
            raise ConfigError(f"Configuration must be an object, got {type(data).__name__}")
        config = RunConfig()
        known = {f.name for f in fields(RunConfig)}

        for key, value in data.items():
            if key not in known:
                logger.warning(f"Unknown configuration key: {key}")
                continue
            expected = FIELD_TYPES[key]
            # bool is an int subclass; keep it out of numeric fields
            if not isinstance(value, expected) or (isinstance(value, bool) and expected is not bool):
                raise ConfigError(f"Configuration key '{key}' has invalid value {value!r}")
            if key == "state" or key.endswith("_profile") or key == "collapse":
                getattr(config, key).clear()
                getattr(config, key).update(value)
            else:
                setattr(config, key, value)

        methods = [m.value for m in IntegrationMethod]
        if config.integration not in methods:
            raise ConfigError(
                f"integration must be one of {', '.join(methods)}, got {config.integration!r}"
            )
        config.position_bin_edges = parse_bin_edges(config.position_bin_edges, "position_bin_edges")
        if config.n_max < 0:
            raise ConfigError(f"n_max must be non-negative, got {config.n_max}")
        if config.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {config.trials}")
        if config.thread_count < 1:
            raise ConfigError(f"thread_count must be at least 1, got {config.thread_count}")
        if not 0 <= config.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {config.seed}")
        return config


def parse_bin_edges(edges: Any, where: str = "bin_edges") -> List[float]:
    """
    Validate position bin edges: a list of finite numbers, returned as floats.

    Args:
        edges: Decoded config value
        where: Key name used in error messages

    Returns:
        Edges as floats, in the given order
    """
    if not isinstance(edges, list):
        raise ConfigError(f"{where} must be a list of numbers, got {edges!r}")
    for e in edges:
        if isinstance(e, bool) or not isinstance(e, (int, float)) or not math.isfinite(e):
            raise ConfigError(f"{where} must hold finite numbers, got {e!r}")
    return [float(e) for e in edges]


def parse_selection(observable: Observable, data: Optional[Dict[str, Any]]):
    """
    Build an EnergySelection or IntervalUnion from a config mapping.

    Energy: {"levels": [...], "complement": false, "includes_h0": false}.
    Position: {"intervals": [[a, b], ...], "complement": false, "includes_q0": false},
    with null for an unbounded end.
    """
    if data is None:
        return None
    if not isinstance(data, dict):
        raise ConfigError(f"Selection must be an object, got {data!r}")
    complement = bool(data.get("complement", False))
    try:
        if Observable(observable) is Observable.ENERGY:
            levels = data.get("levels", [])
            if not isinstance(levels, list) or not all(isinstance(n, int) for n in levels):
                raise InvalidSelection(f"Energy levels must be a list of integers, got {levels!r}")
            return EnergySelection(
                levels=frozenset(levels),
                complement=complement,
                includes_h0=bool(data.get("includes_h0", False)),
            )
        intervals = data.get("intervals", [])
        if not isinstance(intervals, list):
            raise InvalidSelection(f"Intervals must be a list of [a, b] pairs, got {intervals!r}")
        union = IntervalUnion.of(*intervals, includes_q0=bool(data.get("includes_q0", False)))
        return union.real_complement() if complement else union
    except InvalidSelection:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Malformed selection {data!r}: {e}")
