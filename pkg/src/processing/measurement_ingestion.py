"""
LSCM Toolkit - Measurement Ingestion

Parses drive-test RSRP records from CSV, validates them row by row and
averages the samples of every (grid, cell, beam) in the linear domain.
"""

import io
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from src.errors import DimensionError, MeasurementFormatError
from src.evaluation.metrics import to_db, to_linear

MEASUREMENT_COLUMNS = ["grid_id", "cell_id", "beam_id", "rsrp_db"]
OPTIONAL_COLUMNS = ["timestamp"]


@dataclass(frozen=True)
class MeasurementRecord:
    """A single RSRP sample reported for one beam in one grid."""

    grid_id: str
    cell_id: str
    beam_id: str
    rsrp_db: float
    timestamp: Optional[str] = None

    def __post_init__(self):
        if not (self.grid_id and self.cell_id and self.beam_id):
            raise ValueError("grid_id, cell_id and beam_id must be non-empty")
        if not np.isfinite(self.rsrp_db):
            raise ValueError(f"rsrp_db must be finite, got {self.rsrp_db}")


@dataclass(frozen=True)
class GridMeasurement:
    """
    Averaged RSRP of one grid toward one cell.

    Attributes:
        grid_id: Geographic grid identifier.
        cell_id: Serving or neighboring cell the beams belong to.
        beam_labels: Beam order of the vectors below.
        mean_linear: Mean linear RSRP per beam, NaN where not measured.
        counts: Number of samples per beam (0 where not measured).
    """

    grid_id: str
    cell_id: str
    beam_labels: Tuple[str, ...]
    mean_linear: np.ndarray
    counts: np.ndarray

    @property
    def mask(self) -> np.ndarray:
        """True for measured beams."""
        return self.counts > 0

    @property
    def mean_db(self) -> np.ndarray:
        out = np.full(self.mean_linear.shape, np.nan)
        out[self.mask] = to_db(self.mean_linear[self.mask])
        return out

    def present_rows(self) -> List[int]:
        """Codebook rows with at least one sample."""
        return [int(m) for m in np.flatnonzero(self.mask)]

    def y(self) -> np.ndarray:
        """Mean linear RSRP with unmeasured beams set to zero; pair with ``mask``."""
        return np.where(self.mask, self.mean_linear, 0.0)

    def to_dict(self) -> dict:
        return {
            "grid_id": self.grid_id,
            "cell_id": self.cell_id,
            "beams": {
                label: {"mean_linear": float(self.mean_linear[m]), "mean_db": float(self.mean_db[m]), "count": int(self.counts[m])}
                for m, label in enumerate(self.beam_labels)
                if self.counts[m] > 0
            },
        }


class MeasurementIngestor:
    """
    Loads a ``grid_id,cell_id,beam_id,rsrp_db[,timestamp]`` file and turns it
    into GridMeasurement objects.
    """

    def __init__(self, source: Union[str, Path, bytes], beam_labels: Optional[Sequence[str]] = None):
        """
        Args:
            source: CSV file path, or raw CSV bytes (uploads).
            beam_labels: Codebook beam order; defaults to the sorted beam ids found.
        """
        self.source = source
        self.beam_labels = tuple(beam_labels) if beam_labels is not None else None
        self.df = None

    def _describe(self) -> str:
        return "uploaded data" if isinstance(self.source, bytes) else str(self.source)

    def load_data(self) -> pd.DataFrame:
        """Read the CSV as strings so that every row can be validated."""
        if isinstance(self.source, bytes):
            handle = io.BytesIO(self.source)
        else:
            path = Path(self.source)
            if not path.exists():
                raise FileNotFoundError(f"Measurement file not found: {path}")
            handle = path
        try:
            df = pd.read_csv(handle, dtype=str, keep_default_na=False, skipinitialspace=True)
        except pd.errors.EmptyDataError:
            raise MeasurementFormatError(f"{self._describe()} is empty") from None
        except pd.errors.ParserError as exc:
            raise MeasurementFormatError(f"{self._describe()} could not be parsed: {exc}") from None

        missing = [c for c in MEASUREMENT_COLUMNS if c not in df.columns]
        if missing:
            raise MeasurementFormatError(f"header is missing columns {missing}", line_number=1)
        if df.empty:
            raise MeasurementFormatError(f"{self._describe()} holds no measurement rows")
        self.df = df
        return df

    def parse_records(self) -> List[MeasurementRecord]:
        """
        Turn every CSV row into a MeasurementRecord; report the first bad row
        by file line number.
        """
        if self.df is None:
            self.load_data()
        optional = [c for c in OPTIONAL_COLUMNS if c in self.df.columns]
        records = []
        # header is line 1
        for line_number, row in enumerate(self.df.to_dict("records"), start=2):
            try:
                rsrp = float(row["rsrp_db"].strip())
            except ValueError:
                raise MeasurementFormatError(f"invalid rsrp_db '{row['rsrp_db']}'", line_number=line_number) from None
            extras = {c: row[c].strip() or None for c in optional}
            try:
                records.append(
                    MeasurementRecord(row["grid_id"].strip(), row["cell_id"].strip(), row["beam_id"].strip(), rsrp, **extras)
                )
            except ValueError as exc:
                raise MeasurementFormatError(str(exc), line_number=line_number) from None
        return records

    def validate_rows(self) -> pd.DataFrame:
        """Validated records as a frame with a float rsrp_db column."""
        df = pd.DataFrame([asdict(record) for record in self.parse_records()])
        if self.beam_labels is not None:
            unknown = sorted(set(df["beam_id"]) - set(self.beam_labels))
            if unknown:
                raise DimensionError(f"beams not in the codebook: {unknown}")
        return df

    def aggregate(self) -> List[GridMeasurement]:
        """
        Average samples per (grid, cell, beam) in linear units.

        Rows are sorted before reduction so the result does not depend on the
        input row order.
        """
        df = self.validate_rows()
        df = df.sort_values(["grid_id", "cell_id", "beam_id", "rsrp_db"], kind="mergesort").reset_index(drop=True)
        df["rsrp_linear"] = to_linear(df["rsrp_db"].to_numpy())
        labels = self.beam_labels or tuple(sorted(df["beam_id"].unique()))
        position = {label: m for m, label in enumerate(labels)}

        stats = df.groupby(["grid_id", "cell_id", "beam_id"], sort=True)["rsrp_linear"].agg(["sum", "count"])
        measurements = []
        for (grid_id, cell_id), group in stats.groupby(level=[0, 1], sort=True):
            means = np.full(len(labels), np.nan)
            counts = np.zeros(len(labels), dtype=int)
            for (_, _, beam_id), row in group.iterrows():
                m = position[beam_id]
                counts[m] = int(row["count"])
                means[m] = float(row["sum"]) / counts[m]
            if counts.min() == 0:
                logger.warning(f"Grid {grid_id} / cell {cell_id}: {int((counts == 0).sum())} beams not measured")
            measurements.append(GridMeasurement(str(grid_id), str(cell_id), labels, means, counts))

        logger.info(f"Ingested {len(df)} samples into {len(measurements)} grid measurements from {self._describe()}")
        return measurements


def ingest_measurements(source, beam_labels: Optional[Sequence[str]] = None) -> List[GridMeasurement]:
    """
    Read and aggregate a measurement CSV.

    Args:
        source: File path or raw CSV bytes.
        beam_labels: Codebook beam order for the per-beam vectors.

    Returns:
        List of GridMeasurement sorted by (grid_id, cell_id).

    Raises:
        MeasurementFormatError: On a malformed or empty file.
        DimensionError: If a beam id is not a codebook label.
    """
    return MeasurementIngestor(source, beam_labels).aggregate()
