"""
LSCM Toolkit - Scenario Configuration

JSON scenario files validated by pydantic. Every section has defaults, so an
empty document describes the default scenario: an 8x4 half-wavelength array at
2.6 GHz, a 2 degree by 5 degree angular grid and a 32-beam codebook.
"""

import hashlib
import json
import os
from pathlib import Path
from typing import List, Literal, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator, model_validator

from src.errors import ConfigurationError
from src.optimization.solver_types import SolverConfig

DEFAULT_OUTPUT_DIR = "data/output"
DEFAULT_MATRIX_CACHE_SIZE = 8


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ArraySection(_Section):
    n_x: int = Field(8, ge=1)
    n_y: int = Field(4, ge=1)
    frequency_hz: float = Field(2.6e9, gt=0)
    spacing_x_wavelengths: float = Field(0.5, gt=0)
    spacing_y_wavelengths: float = Field(0.5, gt=0)
    sigma: float = Field(0.3, ge=0)
    power: float = Field(1.0, gt=0)


class GridSection(_Section):
    tilt_start: float = -30.0
    tilt_stop: float = 30.0
    tilt_step: float = Field(2.0, gt=0)
    azimuth_start: float = -90.0
    azimuth_stop: float = 90.0
    azimuth_step: float = Field(5.0, gt=0)
    tilt_angles: Optional[List[float]] = None
    azimuth_angles: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_ranges(self):
        if self.tilt_angles is None and self.tilt_stop < self.tilt_start:
            raise ValueError("tilt_stop must not be below tilt_start")
        if self.azimuth_angles is None and self.azimuth_stop < self.azimuth_start:
            raise ValueError("azimuth_stop must not be below azimuth_start")
        return self


class GainSection(_Section):
    kind: Literal["parabolic", "table", "uniform"] = "parabolic"
    peak_gain_dbi: float = 8.0
    tilt_beamwidth_deg: float = Field(65.0, gt=0)
    azimuth_beamwidth_deg: float = Field(65.0, gt=0)
    floor_db: float = Field(30.0, ge=0)
    table_path: Optional[str] = None
    uniform_value: float = Field(1.0, ge=0)

    @model_validator(mode="after")
    def _check_table(self):
        if self.kind == "table" and not self.table_path:
            raise ValueError("table_path is required when kind is 'table'")
        return self


class CodebookSection(_Section):
    kind: Literal["dft", "file"] = "dft"
    steer_tilts: List[float] = Field(default_factory=lambda: [-9.0, -3.0, 3.0, 9.0])
    steer_azimuths: List[float] = Field(default_factory=lambda: [float(a) for a in np.arange(-52.5, 53.0, 15.0)])
    path: Optional[str] = None

    @model_validator(mode="after")
    def _check_source(self):
        if self.kind == "file" and not self.path:
            raise ValueError("path is required when kind is 'file'")
        if self.kind == "dft" and (not self.steer_tilts or not self.steer_azimuths):
            raise ValueError("steer_tilts and steer_azimuths must be non-empty")
        return self


class ShadowingSection(_Section):
    log_std: float = Field(0.0, ge=0)


class TruthSection(_Section):
    k: int = Field(5, ge=1)
    n_grids: int = Field(1, ge=1)
    distribution: Literal["log_uniform", "uniform", "constant"] = "log_uniform"
    dynamic_range_db: float = Field(20.0, ge=0)
    peak: float = Field(1.0, gt=0)
    low: float = Field(0.1, gt=0)
    high: float = Field(1.0, gt=0)


class SimulationSection(_Section):
    t_count: int = Field(1000, ge=1)
    chunk_size: int = Field(8192, ge=1)
    n_jobs: int = 1


class ExperimentSection(_Section):
    sweep_var: Literal["N", "M", "K"] = "N"
    values: List[int] = Field(default_factory=lambda: [100, 200, 300, 400])
    n: int = Field(400, ge=1)
    m: int = Field(32, ge=1)
    k: int = Field(5, ge=1)
    trials: int = Field(200, ge=1)
    solvers: List[Literal["nnomp", "wnomp", "lasso"]] = Field(default_factory=lambda: ["nnomp", "wnomp", "lasso"])
    noise_std: float = Field(0.0, ge=0)
    beam_subset: Literal["spread", "random"] = "spread"
    n_jobs: int = 1

    @field_validator("values")
    @classmethod
    def _positive(cls, values):
        if not values or any(v < 1 for v in values):
            raise ValueError("sweep values must be positive integers")
        return values


class RotationSection(_Section):
    azimuth_offset_deg: float = 10.0
    tilt_offset_deg: float = 0.0
    n_grids: int = Field(20, ge=1)
    k: int = Field(1, ge=1)
    solvers: List[Literal["nnomp", "wnomp", "lasso"]] = Field(default_factory=lambda: ["nnomp", "wnomp", "lasso"])
    serving_cell: Optional[str] = None


class MeasurementsSection(_Section):
    path: Optional[str] = None
    rotated_path: Optional[str] = None


class ScenarioConfig(_Section):
    """Complete scenario: array, grid, gains, beams, randomness and run settings."""

    array: ArraySection = Field(default_factory=ArraySection)
    grid: GridSection = Field(default_factory=GridSection)
    gain: GainSection = Field(default_factory=GainSection)
    codebook: CodebookSection = Field(default_factory=CodebookSection)
    shadowing: ShadowingSection = Field(default_factory=ShadowingSection)
    truth: TruthSection = Field(default_factory=TruthSection)
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    solver_name: Literal["nnomp", "wnomp", "lasso"] = "wnomp"
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    rotation: RotationSection = Field(default_factory=RotationSection)
    measurements: MeasurementsSection = Field(default_factory=MeasurementsSection)
    seed: int = Field(0, ge=0)

    _base_dir: Path = PrivateAttr(default_factory=Path.cwd)

    @property
    def base_dir(self) -> Path:
        return self._base_dir

    def resolve_path(self, value: Optional[str]) -> Optional[Path]:
        """Resolve a path from the config relative to the config file's directory."""
        if value is None:
            return None
        path = Path(value)
        return path if path.is_absolute() else self._base_dir / path


def format_validation_error(error: ValidationError) -> str:
    """One ``field.path: message`` line per pydantic error."""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{location}: {item['msg']}")
    return "; ".join(lines)


def parse_config(data: dict, base_dir: Optional[Path] = None) -> ScenarioConfig:
    """
    Validate a config mapping.

    Raises:
        ConfigurationError: With the failing field paths.
    """
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {format_validation_error(exc)}") from None
    if base_dir is not None:
        config._base_dir = Path(base_dir)
    return config


def load_config(path) -> ScenarioConfig:
    """
    Load and validate a JSON scenario file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigurationError: If it is not valid JSON or fails validation.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return parse_config(data, path.resolve().parent)


def canonical_json(config: ScenarioConfig) -> str:
    return json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def config_hash(config: ScenarioConfig) -> str:
    """SHA-256 of the canonical JSON form of a validated config."""
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def load_environment():
    """Load ``.env`` from the working directory when present."""
    load_dotenv()


def output_dir() -> Path:
    """Default artifact directory, ``LSCM_OUTPUT_DIR`` or data/output."""
    return Path(os.getenv("LSCM_OUTPUT_DIR", DEFAULT_OUTPUT_DIR))


def cors_origins() -> List[str]:
    """Origins allowed by the API, comma-separated in ``LSCM_CORS_ORIGINS`` (none by default)."""
    return [origin.strip() for origin in os.getenv("LSCM_CORS_ORIGINS", "").split(",") if origin.strip()]


def matrix_cache_size() -> int:
    """Coefficient matrices the API keeps in memory, ``LSCM_MATRIX_CACHE_SIZE`` (default 8)."""
    value = os.getenv("LSCM_MATRIX_CACHE_SIZE", str(DEFAULT_MATRIX_CACHE_SIZE))
    try:
        size = int(value)
    except ValueError:
        raise ConfigurationError(f"LSCM_MATRIX_CACHE_SIZE must be an integer, got '{value}'") from None
    if size < 0:
        raise ConfigurationError(f"LSCM_MATRIX_CACHE_SIZE must be non-negative, got {size}")
    return size
