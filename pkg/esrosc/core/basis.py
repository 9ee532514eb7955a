"""
Oscillator eigenvalues, eigenfunctions and quadrature infrastructure.

Eigenfunctions are evaluated with the three-term recurrence on the
normalized Hermite functions in the scaled coordinate x = q / x_c, so
that no factorial or raw Hermite polynomial ever appears.
"""

import logging
import math
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.integrate import simpson, trapezoid

from .exceptions import ConfigError, IndexBeyondTruncation, InvalidRange, LengthMismatch
from .models import Grid, IntegrationMethod, OscillatorParams, QuadratureRule

logger = logging.getLogger(__name__)

DEFAULT_POINT_COUNT = 4001
PI_QUARTER = math.pi ** -0.25

ArrayLike = Union[float, np.ndarray]


def energy_eigenvalue(n: int, params: OscillatorParams) -> float:
    """
    Energy of level n, E_n = hbar * omega * (n + 1/2).

    Args:
        n: Level index (n >= 0)
        params: Oscillator parameters

    Returns:
        Eigenvalue E_n
    """
    if n < 0:
        raise IndexBeyondTruncation(f"Level index must be non-negative, got {n}")
    return params.quantum * (n + 0.5)


def energy_levels(n_max: int, params: OscillatorParams) -> np.ndarray:
    """Eigenvalues E_0 .. E_{n_max} as an array."""
    return params.quantum * (np.arange(n_max + 1) + 0.5)


def scaled_hermite_table(n_max: int, x: ArrayLike) -> np.ndarray:
    """
    Orthonormal Hermite functions psi_0 .. psi_{n_max} of the dimensionless coordinate.

    Uses psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}.
    Every |psi_n(x)| stays below pi^(-1/4), so the table never overflows.

    Args:
        n_max: Highest index to evaluate
        x: Evaluation point(s)

    Returns:
        Array of shape (n_max + 1,) + shape(x)
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape)
    table[0] = PI_QUARTER * np.exp(-0.5 * x * x)
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * x * table[0]
    for n in range(1, n_max):
        table[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * x * table[n]
            - math.sqrt(n / (n + 1)) * table[n - 1]
        )
    return table


def hermite_functions(n_max: int, q: ArrayLike, params: OscillatorParams) -> np.ndarray:
    """Eigenfunctions phi_0 .. phi_{n_max} evaluated at position(s) q."""
    scale = params.length_scale
    return scaled_hermite_table(n_max, np.asarray(q, dtype=float) / scale) / math.sqrt(scale)


def hermite_function(n: int, q: ArrayLike, params: OscillatorParams) -> ArrayLike:
    """
    Eigenfunction phi_n(q) of the oscillator.

    Args:
        n: Level index (n >= 0)
        q: Position(s)
        params: Oscillator parameters

    Returns:
        phi_n(q), scalar for scalar q
    """
    if n < 0:
        raise IndexBeyondTruncation(f"Level index must be non-negative, got {n}")
    values = hermite_functions(n, q, params)[n]
    return float(values) if np.ndim(values) == 0 else values


def hermite_function_bound(params: OscillatorParams) -> float:
    """Uniform bound on |phi_n(q)| valid for every n (Cramer's inequality)."""
    return PI_QUARTER / math.sqrt(params.length_scale)


def build_grid(q_min: float, q_max: float, point_count: int) -> Grid:
    """
    Build a uniform position grid.

    Args:
        q_min: Left end
        q_max: Right end
        point_count: Number of nodes (>= 3)

    Returns:
        Grid instance
    """
    return Grid(q_min=float(q_min), q_max=float(q_max), point_count=int(point_count))


def default_half_width(n_max: int) -> float:
    """
    Default half-width in characteristic lengths.

    Covers the classical turning point of level n_max with a 20% margin plus
    six lengths of Gaussian tail, rounded up to a whole number.
    """
    return float(math.ceil(1.2 * math.sqrt(2 * n_max + 1) + 6.0))


def default_grid(
    n_max: int,
    params: OscillatorParams,
    point_count: int = DEFAULT_POINT_COUNT,
    half_width: Optional[float] = None,
) -> Grid:
    """
    Symmetric grid wide enough for every level up to n_max.

    Args:
        n_max: Highest retained level
        params: Oscillator parameters
        point_count: Number of nodes
        half_width: Half-width in characteristic lengths (default rule if None)

    Returns:
        Grid instance
    """
    lengths = default_half_width(n_max) if half_width is None else float(half_width)
    extent = lengths * params.length_scale
    logger.debug(f"Default grid: +/-{lengths} characteristic lengths, {point_count} points")
    return build_grid(-extent, extent, point_count)


def _integrate_real(values: np.ndarray, dx: float, method: IntegrationMethod) -> float:
    if method is IntegrationMethod.SIMPSON and values.shape[-1] >= 3:
        return float(simpson(values, dx=dx))
    return float(trapezoid(values, dx=dx))


def _integrate(values: np.ndarray, dx: float, method: IntegrationMethod):
    if np.iscomplexobj(values):
        return complex(
            _integrate_real(values.real, dx, method),
            _integrate_real(values.imag, dx, method),
        )
    return _integrate_real(values, dx, method)


def _as_method(method) -> IntegrationMethod:
    if isinstance(method, IntegrationMethod):
        return method
    try:
        return IntegrationMethod(method)
    except ValueError:
        raise ConfigError(f"Unknown integration method: {method!r}")


def integrate_grid(samples, grid: Grid, method=IntegrationMethod.TRAPEZOID):
    """
    Integrate grid samples over [q_min, q_max].

    Args:
        samples: Real or complex samples, one per grid node
        grid: Grid the samples live on
        method: Composite rule ("trapezoid" or "simpson")

    Returns:
        Integral estimate (float for real samples, complex otherwise)
    """
    values = np.asarray(samples)
    if values.shape != (grid.point_count,):
        raise LengthMismatch(
            f"Expected {grid.point_count} samples, got {values.shape[0] if values.ndim else 0}"
        )
    return _integrate(values, grid.spacing, _as_method(method))


def integrate_cells(samples, grid: Grid, cells: np.ndarray, method=IntegrationMethod.SIMPSON):
    """
    Integrate grid samples over a subset of grid cells.

    Cell i is [q_i, q_{i+1}]. Maximal runs of selected cells are integrated
    separately with the composite rule, so a run's endpoints carry end weights.

    Args:
        samples: Real or complex samples, one per grid node
        grid: Grid the samples live on
        cells: Boolean mask of length point_count - 1
        method: Composite rule applied to each run

    Returns:
        Integral estimate over the selected cells
    """
    values = np.asarray(samples)
    if values.shape != (grid.point_count,):
        raise LengthMismatch(f"Expected {grid.point_count} samples, got {values.shape}")
    cells = np.asarray(cells, dtype=bool)
    if cells.shape != (grid.point_count - 1,):
        raise LengthMismatch(f"Expected {grid.point_count - 1} cell flags, got {cells.shape}")

    method = _as_method(method)
    total = 0.0
    padded = np.concatenate(([False], cells, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    for start, stop in zip(edges[::2], edges[1::2]):
        # cells start..stop-1 span nodes start..stop
        total = total + _integrate(values[start:stop + 1], grid.spacing, method)
    return total


@lru_cache(maxsize=16)
def gauss_hermite_rule(order: int) -> QuadratureRule:
    """
    Gauss-Hermite rule for integrals of the form int f(x) exp(-x^2) dx.

    Args:
        order: Number of nodes

    Returns:
        QuadratureRule with positive weights
    """
    if order < 1:
        raise InvalidRange(f"Quadrature order must be positive, got {order}")
    nodes, weights = hermgauss(order)
    return QuadratureRule(nodes=tuple(nodes.tolist()), weights=tuple(weights.tolist()))
