from pydantic import BaseModel, Field
from typing import Any, Dict, List, Literal, Optional


class MatrixRequest(BaseModel):
    """Request model for building a coefficient matrix.

    The config follows the scenario file schema; an empty object selects the default scenario.
    """
    config: Dict[str, Any] = Field(default_factory=dict)
    include_matrix: bool = False


class MatrixSummary(BaseModel):
    """Shape, norms and optionally the entries of a coefficient matrix."""
    config_hash: str
    n_beams: int
    n_columns: int
    beams: List[str]
    zero_columns: List[int]
    col_norm_min: float
    col_norm_max: float
    matrix: Optional[List[List[float]]] = None


class SolveRequest(BaseModel):
    """Request model for recovering the angular power spectrum of one grid."""
    config: Dict[str, Any] = Field(default_factory=dict)
    y: List[float]
    solver: Literal["nnomp", "wnomp", "lasso"] = "wnomp"
    beams: Optional[List[str]] = None


class SolveResponse(BaseModel):
    """Solver result with the support reported as angle labels."""
    config_hash: str
    solver: str
    x_hat: Dict[str, float]
    support: List[int]
    support_labels: List[str]
    residual_norms: List[float]
    termination: str
    iterations: int
    lasso_lambda: Optional[float] = None


class BeamAverage(BaseModel):
    mean_linear: float
    mean_db: float
    count: int


class GridMeasurementModel(BaseModel):
    """Averaged RSRP of one grid toward one cell."""
    grid_id: str
    cell_id: str
    beams: Dict[str, BeamAverage]


class UploadResponse(BaseModel):
    """Response model for a measurement upload."""
    filename: Optional[str] = None
    grids: List[GridMeasurementModel]
