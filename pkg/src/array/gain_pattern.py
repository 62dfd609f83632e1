"""
LSCM Toolkit - Element Gain Pattern

Amplitude gain g_{i,j} of an antenna element toward each grid cell. The gain is
either evaluated from a synthetic parabolic-in-dB element pattern or read from
a gain table file.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy.interpolate import RegularGridInterpolator

from src.array.geometry import AngularGrid, check_index
from src.errors import DimensionError

GAIN_TABLE_COLUMNS = ["tilt_deg", "azimuth_deg", "gain_linear"]


@dataclass(frozen=True)
class GainPattern:
    """
    Element amplitude gains sampled on an angular grid.

    Attributes:
        gains: Array of shape (N_V, N_H), linear amplitude, non-negative.
    """

    gains: np.ndarray

    def __post_init__(self):
        gains = np.array(self.gains, dtype=float)
        if gains.ndim != 2:
            raise DimensionError(f"gain pattern must be a matrix, got shape {gains.shape}")
        if np.any(~np.isfinite(gains)) or np.any(gains < 0):
            raise ValueError("gain pattern entries must be finite and non-negative")
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)

    @classmethod
    def uniform(cls, grid: AngularGrid, value: float = 1.0) -> "GainPattern":
        """Isotropic pattern with the same gain toward every cell."""
        return cls(np.full((grid.n_tilt, grid.n_azimuth), float(value)))

    def check_grid(self, grid: AngularGrid):
        """Raise DimensionError unless the pattern matches the grid."""
        if self.gains.shape != (grid.n_tilt, grid.n_azimuth):
            raise DimensionError(
                f"gain pattern is {self.gains.shape}, grid is ({grid.n_tilt}, {grid.n_azimuth})"
            )

    def flat(self) -> np.ndarray:
        """Gains in flattened cell order."""
        return self.gains.ravel()


def element_gain(pattern: GainPattern, i: int, j: int) -> float:
    """Amplitude gain toward cell (i, j)."""
    check_index(i, pattern.gains.shape[0], "tilt index")
    check_index(j, pattern.gains.shape[1], "azimuth index")
    return float(pattern.gains[i, j])


@dataclass(frozen=True)
class ParabolicElementPattern:
    """
    Synthetic element pattern, parabolic in dB around boresight.

    gain_dB(tilt, az) = peak - min(12 (tilt/tilt_3dB)^2 + 12 (az/az_3dB)^2, floor)
    and the amplitude gain is 10 ** (gain_dB / 20).
    """

    peak_gain_dbi: float = 8.0
    tilt_beamwidth_deg: float = 65.0
    azimuth_beamwidth_deg: float = 65.0
    floor_db: float = 30.0

    def __post_init__(self):
        if self.tilt_beamwidth_deg <= 0 or self.azimuth_beamwidth_deg <= 0:
            raise ValueError("3 dB beamwidths must be positive")
        if self.floor_db < 0:
            raise ValueError("attenuation floor must be non-negative")

    @property
    def coverage(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        return (-90.0, 90.0), (-180.0, 180.0)

    def gain_db(self, tilt_deg, azimuth_deg) -> np.ndarray:
        tilt = np.asarray(tilt_deg, dtype=float)
        azimuth = np.asarray(azimuth_deg, dtype=float)
        attenuation = 12.0 * (tilt / self.tilt_beamwidth_deg) ** 2 + 12.0 * (azimuth / self.azimuth_beamwidth_deg) ** 2
        return self.peak_gain_dbi - np.minimum(attenuation, self.floor_db)

    def amplitude(self, tilt_deg, azimuth_deg) -> np.ndarray:
        return 10.0 ** (self.gain_db(tilt_deg, azimuth_deg) / 20.0)


@dataclass(frozen=True)
class IsotropicElementPattern:
    """Constant amplitude gain in every direction."""

    value: float = 1.0

    @property
    def coverage(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        return (-90.0, 90.0), (-180.0, 180.0)

    def amplitude(self, tilt_deg, azimuth_deg) -> np.ndarray:
        tilt, _ = np.broadcast_arrays(np.asarray(tilt_deg, dtype=float), np.asarray(azimuth_deg, dtype=float))
        return np.full(tilt.shape, float(self.value))


class TabulatedElementPattern:
    """
    Element pattern read from a gain table, linearly interpolated between cells.
    """

    def __init__(self, tilt_angles, azimuth_angles, gains: np.ndarray):
        self.tilt_angles = np.asarray(tilt_angles, dtype=float)
        self.azimuth_angles = np.asarray(azimuth_angles, dtype=float)
        self.gains = np.asarray(gains, dtype=float)
        self._interpolator = RegularGridInterpolator(
            (self.tilt_angles, self.azimuth_angles), self.gains,
            method="linear", bounds_error=False, fill_value=np.nan,
        )

    @property
    def coverage(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        return (
            (float(self.tilt_angles[0]), float(self.tilt_angles[-1])),
            (float(self.azimuth_angles[0]), float(self.azimuth_angles[-1])),
        )

    def amplitude(self, tilt_deg, azimuth_deg) -> np.ndarray:
        tilt, azimuth = np.broadcast_arrays(np.asarray(tilt_deg, dtype=float), np.asarray(azimuth_deg, dtype=float))
        points = np.stack([tilt.ravel(), azimuth.ravel()], axis=-1)
        values = self._interpolator(points).reshape(tilt.shape)
        if np.isnan(values).any():
            raise ValueError("requested angles fall outside the gain table")
        return values


def sample_gain_pattern(element, grid: AngularGrid) -> GainPattern:
    """
    Evaluate an element pattern on every cell of a grid.

    Args:
        element: ParabolicElementPattern or TabulatedElementPattern.
        grid: Angular grid.

    Returns:
        GainPattern: Gains of shape (N_V, N_H).
    """
    tilts, azimuths = np.meshgrid(grid.tilt_angles, grid.azimuth_angles, indexing="ij")
    return GainPattern(element.amplitude(tilts, azimuths))


def load_gain_table(path, grid: AngularGrid) -> Tuple[GainPattern, TabulatedElementPattern]:
    """
    Read a ``tilt_deg,azimuth_deg,gain_linear`` table covering the whole grid.

    Args:
        path: CSV file path.
        grid: Grid the table must cover.

    Returns:
        The gain pattern on the grid and an interpolating element pattern.

    Raises:
        FileNotFoundError: If the file does not exist.
        DimensionError: If a grid cell has no row.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Gain table not found: {path}")

    df = pd.read_csv(path)
    missing = set(GAIN_TABLE_COLUMNS) - set(df.columns)
    if missing:
        raise ValueError(f"gain table {path} is missing columns: {sorted(missing)}")
    if (df["gain_linear"] < 0).any():
        raise ValueError(f"gain table {path} contains negative gains")

    table = df.pivot_table(index="tilt_deg", columns="azimuth_deg", values="gain_linear", aggfunc="mean")
    try:
        gains = table.loc[list(grid.tilt_angles), list(grid.azimuth_angles)].to_numpy(dtype=float)
    except KeyError as exc:
        raise DimensionError(f"gain table {path} does not cover the grid: {exc}") from None
    if np.isnan(gains).any():
        raise DimensionError(f"gain table {path} does not cover every grid cell")

    element = TabulatedElementPattern(table.index.to_numpy(), table.columns.to_numpy(), table.to_numpy(dtype=float))
    logger.info(f"Loaded gain table with {len(df)} rows from {path}")
    return GainPattern(gains), element
