"""
LSCM Toolkit - Array Geometry

This module describes the uniform rectangular transmit array and the angular
grid over which the channel is discretized, and computes the per-antenna phase
that links a departure angle, an antenna element and a beam precoder.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class ArrayConfig:
    """
    Transmit array geometry and radio parameters.

    Antenna x runs along the horizontal axis (azimuth dependence) and antenna y
    along the vertical axis (tilt dependence). Indices are zero-based.
    """

    n_x: int = 8
    n_y: int = 4
    d_x: float = 0.5 * SPEED_OF_LIGHT / 2.6e9
    d_y: float = 0.5 * SPEED_OF_LIGHT / 2.6e9
    wavelength: float = SPEED_OF_LIGHT / 2.6e9
    sigma: float = 0.3
    power: float = 1.0

    def __post_init__(self):
        if int(self.n_x) != self.n_x or self.n_x < 1:
            raise ValueError(f"n_x must be a positive integer, got {self.n_x}")
        if int(self.n_y) != self.n_y or self.n_y < 1:
            raise ValueError(f"n_y must be a positive integer, got {self.n_y}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if not (self.d_x > 0 and self.d_y > 0):
            raise ValueError(f"element spacing must be positive, got d_x={self.d_x}, d_y={self.d_y}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if not self.power > 0:
            raise ValueError(f"power must be positive, got {self.power}")

    @property
    def n_antennas(self) -> int:
        """Total number of elements N_T = n_x * n_y."""
        return self.n_x * self.n_y

    def antenna_positions(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Flattened (x, y) indices of every element, x varying slowest.

        Returns:
            Two integer arrays of length n_antennas.
        """
        xs, ys = np.meshgrid(np.arange(self.n_x), np.arange(self.n_y), indexing="ij")
        return xs.ravel(), ys.ravel()


@dataclass(frozen=True)
class AngularGrid:
    """
    Discretized tilt and azimuth departure angles, in degrees.

    Cell (i, j) flattens to n = i * N_H + j, azimuth varying fastest.
    """

    tilt_angles: Tuple[float, ...]
    azimuth_angles: Tuple[float, ...]

    def __post_init__(self):
        tilts = np.asarray(self.tilt_angles, dtype=float)
        azimuths = np.asarray(self.azimuth_angles, dtype=float)
        if tilts.ndim != 1 or tilts.size == 0 or azimuths.ndim != 1 or azimuths.size == 0:
            raise ValueError("tilt and azimuth angle lists must be non-empty")
        if np.any(np.diff(tilts) <= 0):
            raise ValueError("tilt angles must be strictly increasing")
        if np.any(np.diff(azimuths) <= 0):
            raise ValueError("azimuth angles must be strictly increasing")
        object.__setattr__(self, "tilt_angles", tuple(float(t) for t in tilts))
        object.__setattr__(self, "azimuth_angles", tuple(float(a) for a in azimuths))

    @classmethod
    def from_ranges(
        cls,
        tilt_range: Tuple[float, float, float] = (-30.0, 30.0, 2.0),
        azimuth_range: Tuple[float, float, float] = (-90.0, 90.0, 5.0),
    ) -> "AngularGrid":
        """
        Build a grid from inclusive (start, stop, step) ranges.

        The defaults use the 2 degree tilt and 5 degree azimuth spacing.
        """
        return cls(_inclusive_range(*tilt_range), _inclusive_range(*azimuth_range))

    @property
    def n_tilt(self) -> int:
        return len(self.tilt_angles)

    @property
    def n_azimuth(self) -> int:
        return len(self.azimuth_angles)

    @property
    def size(self) -> int:
        """Number of cells N = N_V * N_H."""
        return self.n_tilt * self.n_azimuth

    def flat_index(self, i: int, j: int) -> int:
        """Flattened index of cell (i, j)."""
        check_index(i, self.n_tilt, "tilt index")
        check_index(j, self.n_azimuth, "azimuth index")
        return i * self.n_azimuth + j

    def cell(self, n: int) -> Tuple[int, int]:
        """Inverse of flat_index."""
        check_index(n, self.size, "cell index")
        return divmod(n, self.n_azimuth)

    def flat_angles(self) -> Tuple[np.ndarray, np.ndarray]:
        """Tilt and azimuth of every cell in flattened order."""
        tilts, azimuths = np.meshgrid(self.tilt_angles, self.azimuth_angles, indexing="ij")
        return tilts.ravel(), azimuths.ravel()

    def nearest_cell(self, tilt_deg: float, azimuth_deg: float) -> int:
        """Flattened index of the cell closest to a direction (per axis)."""
        i = int(np.argmin(np.abs(np.asarray(self.tilt_angles) - tilt_deg)))
        j = int(np.argmin(np.abs(np.asarray(self.azimuth_angles) - azimuth_deg)))
        return self.flat_index(i, j)

    def labels(self) -> List[str]:
        """Column labels ``t<tilt>_a<azimuth>`` in flattened order."""
        return [f"t{t:g}_a{a:g}" for t in self.tilt_angles for a in self.azimuth_angles]

    def shifted(self, tilt_offset: float, azimuth_offset: float) -> "AngularGrid":
        """The same cells expressed in a frame rotated by the given offsets."""
        return AngularGrid(
            tuple(t - tilt_offset for t in self.tilt_angles),
            tuple(a - azimuth_offset for a in self.azimuth_angles),
        )


def _inclusive_range(start: float, stop: float, step: float) -> Tuple[float, ...]:
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(count), 10))


def check_index(value: int, size: int, name: str):
    if not 0 <= value < size:
        raise IndexError(f"{name} {value} out of range [0, {size})")


def geometric_phase(cfg: ArrayConfig, tilt_deg, azimuth_deg) -> np.ndarray:
    """
    Geometric part of the per-antenna phase for one or more directions.

    Args:
        cfg: Array configuration.
        tilt_deg: Tilt angle(s) in degrees.
        azimuth_deg: Azimuth angle(s) in degrees, broadcastable with tilt_deg.

    Returns:
        Array of shape ``broadcast_shape + (n_antennas,)`` holding
        2*pi*(d_x*x/lambda)*cos(tilt)*sin(az) + 2*pi*(d_y*y/lambda)*sin(tilt).
    """
    tilt = np.radians(np.asarray(tilt_deg, dtype=float))[..., None]
    azimuth = np.radians(np.asarray(azimuth_deg, dtype=float))[..., None]
    xs, ys = cfg.antenna_positions()
    kx = 2.0 * np.pi * cfg.d_x / cfg.wavelength
    ky = 2.0 * np.pi * cfg.d_y / cfg.wavelength
    return kx * xs * np.cos(tilt) * np.sin(azimuth) + ky * ys * np.sin(tilt)


def steering_phase(cfg: ArrayConfig, grid: AngularGrid, codebook, m: int, i: int, j: int, x: int, y: int) -> float:
    """
    Phase psi of element (x, y) toward cell (i, j) under beam m, in radians.

    Raises:
        IndexError: If any index is out of range.
    """
    check_index(m, codebook.size, "beam index")
    check_index(i, grid.n_tilt, "tilt index")
    check_index(j, grid.n_azimuth, "azimuth index")
    check_index(x, cfg.n_x, "antenna x-index")
    check_index(y, cfg.n_y, "antenna y-index")

    tilt = np.radians(grid.tilt_angles[i])
    azimuth = np.radians(grid.azimuth_angles[j])
    geometric = (
        2.0 * np.pi * (cfg.d_x * x / cfg.wavelength) * np.cos(tilt) * np.sin(azimuth)
        + 2.0 * np.pi * (cfg.d_y * y / cfg.wavelength) * np.sin(tilt)
    )
    return float(geometric - codebook.phases[m, x, y])


def check_directions(directions: Sequence[Tuple[float, float]]) -> np.ndarray:
    """Validate a list of (tilt, azimuth) pairs and return it as an (K, 2) array."""
    arr = np.asarray(directions, dtype=float)
    if arr.size == 0:
        raise ValueError("direction list must not be empty")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("directions must be (tilt, azimuth) pairs")
    return arr
