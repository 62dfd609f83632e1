"""
LSCM Toolkit - Beam Codebook

Phase-only beam precoders. Each beam m is an n_x by n_y matrix of phases
phi_{x,y}; the precoder entries are exp(1j * phi) and therefore unit modulus.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from src.array.geometry import ArrayConfig, check_directions, geometric_phase
from src.errors import DimensionError

CODEBOOK_COLUMNS = ["beam", "x", "y", "phase_rad"]


@dataclass(frozen=True)
class BeamCodebook:
    """
    A set of M phase-only precoders.

    Attributes:
        phases: Array of shape (M, n_x, n_y), radians.
        labels: One name per beam (defaults to ``beam-<m>``).
    """

    phases: np.ndarray
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float)
        if phases.ndim != 3 or phases.shape[0] == 0:
            raise DimensionError(f"codebook phases must have shape (M, n_x, n_y), got {phases.shape}")
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        labels = tuple(self.labels) if self.labels else tuple(f"beam-{m}" for m in range(phases.shape[0]))
        if len(labels) != phases.shape[0]:
            raise DimensionError(f"{len(labels)} labels for {phases.shape[0]} beams")
        if len(set(labels)) != len(labels):
            raise ValueError("beam labels must be unique")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        """Number of beams M."""
        return self.phases.shape[0]

    def precoders(self) -> np.ndarray:
        """Unit-modulus precoder entries, shape (M, n_x * n_y), x varying slowest."""
        return np.exp(1j * self.phases.reshape(self.size, -1))

    def check_array(self, cfg: ArrayConfig):
        """Raise DimensionError unless every beam matches the array shape."""
        if self.phases.shape[1:] != (cfg.n_x, cfg.n_y):
            raise DimensionError(
                f"codebook beams are {self.phases.shape[1]}x{self.phases.shape[2]}, "
                f"array is {cfg.n_x}x{cfg.n_y}"
            )

    def subset(self, rows: Sequence[int]) -> "BeamCodebook":
        """Codebook restricted to the given beam rows, in the given order."""
        rows = list(rows)
        return BeamCodebook(self.phases[rows], tuple(self.labels[m] for m in rows))

    def row_of(self, label: str) -> int:
        """Beam row carrying a label."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown beam label: {label}") from None


def make_dft_codebook(
    cfg: ArrayConfig,
    steer_directions: Sequence[Tuple[float, float]],
    labels: Optional[Sequence[str]] = None,
) -> BeamCodebook:
    """
    Build a conjugate-matched codebook with one beam per steer direction.

    Beam m uses phi_{x,y} equal to the geometric phase toward its steer
    direction, so psi vanishes there and the main lobe points at it.

    Args:
        cfg: Array configuration.
        steer_directions: (tilt, azimuth) pairs in degrees.
        labels: Optional beam names.

    Returns:
        BeamCodebook: One beam per direction.
    """
    directions = check_directions(steer_directions)
    phases = geometric_phase(cfg, directions[:, 0], directions[:, 1])
    return BeamCodebook(phases.reshape(len(directions), cfg.n_x, cfg.n_y), tuple(labels or ()))


def steer_grid(tilts: Sequence[float], azimuths: Sequence[float]):
    """All (tilt, azimuth) combinations, azimuth varying fastest."""
    return [(float(t), float(a)) for t in tilts for a in azimuths]


def save_codebook(codebook: BeamCodebook, path) -> Path:
    """
    Write a codebook as ``beam,x,y,phase_rad`` rows.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    m, n_x, n_y = codebook.phases.shape
    beams, xs, ys = np.meshgrid(np.arange(m), np.arange(n_x), np.arange(n_y), indexing="ij")
    df = pd.DataFrame({
        "beam": np.asarray(codebook.labels)[beams.ravel()],
        "x": xs.ravel(),
        "y": ys.ravel(),
        "phase_rad": codebook.phases.ravel(),
    })
    df.to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Codebook with {m} beams saved to {path}")
    return path


def load_codebook(path, cfg: ArrayConfig) -> BeamCodebook:
    """
    Read a ``beam,x,y,phase_rad`` CSV into a codebook for the given array.

    Beams keep their first-appearance order; rows may otherwise come in any order.

    Raises:
        FileNotFoundError: If the file does not exist.
        DimensionError: If a beam misses elements or indices exceed the array.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Codebook file not found: {path}")

    df = pd.read_csv(path, dtype={"beam": str})
    missing = set(CODEBOOK_COLUMNS) - set(df.columns)
    if missing:
        raise ValueError(f"codebook file {path} is missing columns: {sorted(missing)}")

    labels = list(dict.fromkeys(df["beam"]))
    phases = np.full((len(labels), cfg.n_x, cfg.n_y), np.nan)
    rows = df["beam"].map({label: m for m, label in enumerate(labels)}).to_numpy()
    xs = df["x"].to_numpy(dtype=int)
    ys = df["y"].to_numpy(dtype=int)
    if xs.min() < 0 or ys.min() < 0 or xs.max() >= cfg.n_x or ys.max() >= cfg.n_y:
        raise DimensionError(f"codebook element indices exceed the {cfg.n_x}x{cfg.n_y} array")
    phases[rows, xs, ys] = df["phase_rad"].to_numpy(dtype=float)
    if np.isnan(phases).any():
        incomplete = [labels[m] for m in np.unique(np.argwhere(np.isnan(phases))[:, 0])]
        raise DimensionError(f"codebook beams missing elements: {incomplete}")

    logger.info(f"Loaded codebook with {len(labels)} beams from {path}")
    return BeamCodebook(phases, tuple(labels))
