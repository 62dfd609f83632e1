"""
LSCM Toolkit - Coefficient Matrix

Builds the M x N matrix A that maps expected channel gains per angular cell to
expected per-beam RSRP:

    A[m, n] = P g_n^2 ( N_T (1 - exp(-sigma^2)) + exp(-sigma^2) |sum_{x,y} exp(1j psi)|^2 )

The double cosine sum over antenna pairs is evaluated through the coherent-sum
identity sum sum cos(psi - psi') = (sum cos psi)^2 + (sum sin psi)^2.
"""

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from loguru import logger

from src.array.codebook import BeamCodebook
from src.array.gain_pattern import GainPattern
from src.array.geometry import ArrayConfig, AngularGrid, check_index, geometric_phase
from src.errors import DimensionError

_LABEL_PATTERN = re.compile(r"^t(?P<tilt>-?[0-9.eE+-]+)_a(?P<azimuth>-?[0-9.eE+-]+)$")


@dataclass(frozen=True)
class CoefficientMatrix:
    """
    Coefficient matrix with its column norms and column-normalized variant.

    Attributes:
        a: Non-negative matrix of shape (M, N).
        col_norms: l2 norm of every column (zero for zero columns).
        a_hat: Column-normalized matrix; zero columns stay zero.
        grid: Angular grid the columns come from.
        column_index: Flattened grid index of every column.
        beam_labels: Name of every row.
        zero_columns: Positions of columns with zero norm.
    """

    a: np.ndarray
    col_norms: np.ndarray
    a_hat: np.ndarray
    grid: AngularGrid
    column_index: np.ndarray
    beam_labels: Tuple[str, ...]
    zero_columns: Tuple[int, ...]

    @classmethod
    def from_matrix(
        cls,
        a: np.ndarray,
        grid: AngularGrid,
        column_index: Optional[Sequence[int]] = None,
        beam_labels: Optional[Sequence[str]] = None,
    ) -> "CoefficientMatrix":
        """
        Wrap a raw matrix, computing norms, the normalized matrix and zero columns.

        Args:
            a: Matrix of shape (M, N).
            grid: Grid the columns refer to.
            column_index: Flattened grid index per column (identity by default).
            beam_labels: Row names (``beam-<m>`` by default).

        Returns:
            CoefficientMatrix: Immutable matrix bundle.
        """
        a = np.array(a, dtype=float)
        if a.ndim != 2:
            raise DimensionError(f"coefficient matrix must be 2-D, got shape {a.shape}")
        n_rows, n_cols = a.shape
        if column_index is None:
            if n_cols != grid.size:
                raise DimensionError(f"{n_cols} columns for a grid of {grid.size} cells")
            column_index = np.arange(n_cols)
        column_index = np.array(column_index, dtype=int)
        if column_index.shape != (n_cols,):
            raise DimensionError(f"column index has {column_index.size} entries for {n_cols} columns")
        labels = tuple(beam_labels) if beam_labels is not None else tuple(f"beam-{m}" for m in range(n_rows))
        if len(labels) != n_rows:
            raise DimensionError(f"{len(labels)} beam labels for {n_rows} rows")

        col_norms = np.linalg.norm(a, axis=0)
        zero = col_norms <= 0.0
        a_hat = np.zeros_like(a)
        a_hat[:, ~zero] = a[:, ~zero] / col_norms[~zero]
        zero_columns = tuple(int(n) for n in np.flatnonzero(zero))
        if zero_columns:
            logger.warning(f"{len(zero_columns)} zero-norm columns excluded from normalization")

        for arr in (a, col_norms, a_hat, column_index):
            arr.setflags(write=False)
        return cls(a, col_norms, a_hat, grid, column_index, labels, zero_columns)

    @property
    def codebook_size(self) -> int:
        """Number of beams M."""
        return self.a.shape[0]

    @property
    def n_columns(self) -> int:
        return self.a.shape[1]

    @property
    def valid_columns(self) -> np.ndarray:
        """Boolean mask of columns that can carry power."""
        return self.col_norms > 0.0

    def labels(self) -> List[str]:
        """Angle labels of the columns."""
        grid_labels = self.grid.labels()
        return [grid_labels[n] for n in self.column_index]

    def expected_rsrp(self, x: np.ndarray) -> np.ndarray:
        """y = A x for a vector over this matrix's columns."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_columns,):
            raise DimensionError(f"x has shape {x.shape}, expected ({self.n_columns},)")
        return self.a @ x


def coherent_power(psi: np.ndarray) -> np.ndarray:
    """(sum cos psi)^2 + (sum sin psi)^2 over the last axis."""
    return np.cos(psi).sum(axis=-1) ** 2 + np.sin(psi).sum(axis=-1) ** 2


def _coefficient(cfg: ArrayConfig, gain, coherent):
    decay = np.exp(-cfg.sigma ** 2)
    incoherent = cfg.n_antennas * -np.expm1(-cfg.sigma ** 2)
    return cfg.power * np.square(gain) * (incoherent + decay * coherent)


def _check_inputs(cfg: ArrayConfig, grid: AngularGrid, pattern: GainPattern, codebook: BeamCodebook):
    codebook.check_array(cfg)
    pattern.check_grid(grid)


def compute_coefficient(
    cfg: ArrayConfig,
    grid: AngularGrid,
    pattern: GainPattern,
    codebook: BeamCodebook,
    m: int,
    i: int,
    j: int,
) -> float:
    """
    Single entry A^{(m)}_{i,j}, in O(N_T).

    Raises:
        IndexError: If m, i or j is out of range.
    """
    _check_inputs(cfg, grid, pattern, codebook)
    check_index(m, codebook.size, "beam index")
    check_index(i, grid.n_tilt, "tilt index")
    check_index(j, grid.n_azimuth, "azimuth index")

    psi = geometric_phase(cfg, grid.tilt_angles[i], grid.azimuth_angles[j]) - codebook.phases[m].ravel()
    return float(_coefficient(cfg, pattern.gains[i, j], coherent_power(psi)))


def build_matrix(
    cfg: ArrayConfig,
    grid: AngularGrid,
    pattern: GainPattern,
    codebook: BeamCodebook,
    n_jobs: int = 1,
) -> CoefficientMatrix:
    """
    Build the full coefficient matrix, one row per beam.

    Rows are independent; any ``n_jobs`` gives the same bits because every
    entry is reduced over antennas in the same order.

    Args:
        cfg: Array configuration.
        grid: Angular grid (columns in flattened order).
        pattern: Element gains on the grid.
        codebook: Beam precoders (rows).
        n_jobs: Parallel workers over beams.

    Returns:
        CoefficientMatrix: The M x N matrix and its derived quantities.
    """
    _check_inputs(cfg, grid, pattern, codebook)
    tilts, azimuths = grid.flat_angles()
    geometric = geometric_phase(cfg, tilts, azimuths)
    gains = pattern.flat()
    phases = codebook.phases.reshape(codebook.size, -1)

    def row(m: int) -> np.ndarray:
        return _coefficient(cfg, gains, coherent_power(geometric - phases[m]))

    if n_jobs == 1:
        rows = [row(m) for m in range(codebook.size)]
    else:
        rows = Parallel(n_jobs=n_jobs)(delayed(row)(m) for m in range(codebook.size))

    logger.info(f"Built coefficient matrix with {codebook.size} beams and {grid.size} angular cells")
    return CoefficientMatrix.from_matrix(np.vstack(rows), grid, beam_labels=codebook.labels)


def top_n_columns(cm: CoefficientMatrix, n: int) -> Tuple[CoefficientMatrix, np.ndarray]:
    """
    Keep the n columns with the largest norms.

    Columns come out in descending norm order, ties broken by lower flattened
    grid index.

    Returns:
        The restricted matrix and the flattened grid index of each kept column.

    Raises:
        ValueError: If n is not in [1, N].
    """
    if n <= 0:
        raise ValueError(f"number of columns must be positive, got {n}")
    if n > cm.n_columns:
        raise ValueError(f"cannot keep {n} of {cm.n_columns} columns")
    order = np.lexsort((cm.column_index, -cm.col_norms))[:n]
    index_map = cm.column_index[order]
    restricted = CoefficientMatrix.from_matrix(cm.a[:, order], cm.grid, index_map, cm.beam_labels)
    return restricted, np.array(index_map)


def select_rows(cm: CoefficientMatrix, rows: Sequence[int]) -> CoefficientMatrix:
    """Matrix restricted to a subset of beams (row deletion)."""
    rows = [int(m) for m in rows]
    if not rows:
        raise ValueError("at least one beam row is required")
    for m in rows:
        check_index(m, cm.codebook_size, "beam index")
    return CoefficientMatrix.from_matrix(
        cm.a[rows], cm.grid, cm.column_index, tuple(cm.beam_labels[m] for m in rows)
    )


def save_matrix_csv(cm: CoefficientMatrix, path) -> Path:
    """
    Dense CSV export: a ``beam`` column followed by one ``t<tilt>_a<az>`` column per cell.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(cm.a, columns=cm.labels())
    df.insert(0, "beam", list(cm.beam_labels))
    df.to_csv(path, index=False, float_format="%.17g")
    return path


def load_matrix_csv(path, grid: Optional[AngularGrid] = None) -> CoefficientMatrix:
    """
    Read a matrix written by save_matrix_csv.

    The grid is rebuilt from the column labels unless one is given.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")
    df = pd.read_csv(path, dtype={"beam": str})
    if df.columns[0] != "beam":
        raise ValueError(f"matrix file {path} must start with a 'beam' column")
    labels = list(df.columns[1:])
    angles = [_parse_label(label) for label in labels]
    if grid is None:
        grid = AngularGrid(tuple(sorted({t for t, _ in angles})), tuple(sorted({a for _, a in angles})))
    positions = {label: n for n, label in enumerate(grid.labels())}
    try:
        column_index = [positions[label] for label in labels]
    except KeyError as exc:
        raise DimensionError(f"column {exc} is not a cell of the grid") from None
    return CoefficientMatrix.from_matrix(df.iloc[:, 1:].to_numpy(dtype=float), grid, column_index, df["beam"].tolist())


def save_matrix_json(cm: CoefficientMatrix, path, config_hash: Optional[str] = None) -> Path:
    """JSON export carrying the matrix, norms, labels and grid; meant for small cases."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "config_hash": config_hash,
        "grid": {"tilt_angles": list(cm.grid.tilt_angles), "azimuth_angles": list(cm.grid.azimuth_angles)},
        "beams": list(cm.beam_labels),
        "columns": cm.labels(),
        "column_index": [int(n) for n in cm.column_index],
        "col_norms": [float(v) for v in cm.col_norms],
        "zero_columns": list(cm.zero_columns),
        "a": [[float(v) for v in row] for row in cm.a],
    }
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
    return path


def load_matrix_json(path) -> CoefficientMatrix:
    """Read a matrix written by save_matrix_json."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")
    with open(path, "r") as f:
        payload = json.load(f)
    grid = AngularGrid(tuple(payload["grid"]["tilt_angles"]), tuple(payload["grid"]["azimuth_angles"]))
    return CoefficientMatrix.from_matrix(
        np.asarray(payload["a"], dtype=float), grid, payload["column_index"], payload["beams"]
    )


def _parse_label(label: str) -> Tuple[float, float]:
    match = _LABEL_PATTERN.match(label)
    if match is None:
        raise ValueError(f"malformed angle label: {label}")
    return float(match.group("tilt")), float(match.group("azimuth"))
