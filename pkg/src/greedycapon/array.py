"""Uniform linear array manifold, search grids and steering-vector coherence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_HALF_PI = np.pi / 2
# slack for angles produced by deg2rad(+-90)
_DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class ArraySpec:
    """Uniform linear array with ``n_sensors`` elements spaced ``spacing_ratio``
    wavelengths apart."""

    n_sensors: int
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if int(self.n_sensors) != self.n_sensors or self.n_sensors < 2:
            raise ValueError(f"n_sensors must be an integer >= 2, got {self.n_sensors}")
        if not self.spacing_ratio > 0:
            raise ValueError(f"spacing_ratio must be positive, got {self.spacing_ratio}")


def _check_domain(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any(np.abs(theta) > _HALF_PI + _DOMAIN_TOL):
        raise ValueError("steering angles must lie in [-pi/2, pi/2] radians")
    return theta


def ula_steering(spec: ArraySpec, theta) -> np.ndarray:
    """Steering vector(s) of a ULA.

    Entry ``n`` is ``exp(-1j * n * 2*pi * (d/lambda) * sin(theta))`` so the
    first sensor is the phase reference and ``||a||^2 = N``.

    Args:
        spec: Array description.
        theta: Angle in radians, scalar or 1-D array.

    Returns:
        Length-N vector for scalar ``theta``; N x len(theta) matrix otherwise.
    """
    theta = _check_domain(theta)
    n = np.arange(spec.n_sensors)
    phase = -2j * np.pi * spec.spacing_ratio * np.multiply.outer(n, np.sin(theta))
    return np.exp(phase)


@dataclass(frozen=True)
class SteeringGrid:
    """Search dictionary: angles (radians, increasing) and the N x M steering matrix."""

    angles: np.ndarray
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        if angles.ndim != 1 or angles.size < 2:
            raise ValueError("a grid needs at least two angles")
        if np.any(np.diff(angles) <= 0):
            raise ValueError("grid angles must be strictly increasing")
        if self.vectors.shape[1] != angles.size:
            raise ValueError("steering matrix columns must match the number of angles")
        angles.flags.writeable = False
        self.vectors.flags.writeable = False
        object.__setattr__(self, "angles", angles)

    @property
    def size(self) -> int:
        return self.angles.size

    @property
    def n_sensors(self) -> int:
        return self.vectors.shape[0]

    @property
    def angles_deg(self) -> np.ndarray:
        return np.rad2deg(self.angles)

    def __len__(self):
        return self.size


def build_grid(spec: ArraySpec, theta_min: float, theta_max: float, M: int) -> SteeringGrid:
    """Uniform grid of ``M`` angles from ``theta_min`` to ``theta_max`` inclusive (radians)."""
    if int(M) != M or M < 2:
        raise ValueError(f"grid size must be an integer >= 2, got {M}")
    if not theta_min < theta_max:
        raise ValueError("theta_min must be smaller than theta_max")
    angles = np.linspace(theta_min, theta_max, int(M))
    return SteeringGrid(angles, ula_steering(spec, angles))


def build_grid_deg(spec: ArraySpec, deg_min: float = -90.0, deg_max: float = 90.0,
                   M: int = 1801) -> SteeringGrid:
    """Degree front-end to :func:`build_grid`; defaults give the 0.1 degree half-space grid."""
    return build_grid(spec, np.deg2rad(deg_min), np.deg2rad(deg_max), M)


def coherence(a_i: np.ndarray, a_j: np.ndarray) -> float:
    """Return ``|a_i^H a_j|``."""
    a_i = np.asarray(a_i)
    a_j = np.asarray(a_j)
    if a_i.shape != a_j.shape or a_i.ndim != 1:
        raise ValueError(f"steering vectors must be 1-D of equal length, got {a_i.shape} and {a_j.shape}")
    return float(np.abs(np.vdot(a_i, a_j)))


def coherence_matrix(grid: SteeringGrid, rows, cols) -> np.ndarray:
    """Pairwise ``|a_i^H a_j|`` for grid indices ``rows`` x ``cols``."""
    A = grid.vectors
    return np.abs(A[:, list(rows)].conj().T @ A[:, list(cols)])
