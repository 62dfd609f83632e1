from functools import lru_cache
import json
import os
import sys

from fastapi import FastAPI, File, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
import numpy as np

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Import project modules
from src.config.scenario_config import (
    ScenarioConfig,
    canonical_json,
    config_hash,
    cors_origins,
    load_environment,
    matrix_cache_size,
    parse_config,
)
from src.errors import LscmError
from src.modeling.coefficient_matrix import CoefficientMatrix, select_rows
from src.optimization.dispatch import solve
from src.pipeline import build_coefficient_matrix, build_scenario
from src.processing.measurement_ingestion import ingest_measurements

# Import API models
from api.models.api_models import (
    MatrixRequest,
    MatrixSummary,
    SolveRequest,
    SolveResponse,
    UploadResponse,
)

load_environment()

app = FastAPI(title="LSCM Toolkit API")

app.add_middleware(
    CORSMiddleware,
    allow_origins=cors_origins(),
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

def _load(config_data) -> ScenarioConfig:
    try:
        return parse_config(config_data)
    except LscmError as e:
        raise HTTPException(status_code=422, detail=str(e))

@lru_cache(maxsize=matrix_cache_size())
def _cached_matrix(config_json: str) -> CoefficientMatrix:
    """Matrix of a validated config, keyed by its canonical JSON."""
    return build_coefficient_matrix(build_scenario(parse_config(json.loads(config_json))))

def _matrix(config: ScenarioConfig) -> CoefficientMatrix:
    try:
        return _cached_matrix(canonical_json(config))
    except (LscmError, ValueError, FileNotFoundError) as e:
        raise HTTPException(status_code=400, detail=str(e))

@app.get("/")
async def root():
    """Root endpoint to check if the API is running."""
    return {"message": "LSCM Toolkit API is running"}

@app.post("/api/matrix", response_model=MatrixSummary)
async def matrix_endpoint(request: MatrixRequest):
    """
    Build the coefficient matrix of a scenario and summarize it.

    Set ``include_matrix`` to also receive the entries (beams by cells).
    """
    config = _load(request.config)
    cm = _matrix(config)
    return MatrixSummary(
        config_hash=config_hash(config),
        n_beams=cm.codebook_size,
        n_columns=cm.n_columns,
        beams=list(cm.beam_labels),
        zero_columns=list(cm.zero_columns),
        col_norm_min=float(cm.col_norms.min()),
        col_norm_max=float(cm.col_norms.max()),
        matrix=cm.a.tolist() if request.include_matrix else None,
    )

@app.post("/api/solve", response_model=SolveResponse)
async def solve_endpoint(request: SolveRequest):
    """
    Recover the angular power spectrum of one grid from per-beam RSRP (linear).

    When ``beams`` is given, ``y`` holds those beams only and the matrix rows
    are restricted to them.
    """
    config = _load(request.config)
    cm = _matrix(config)
    try:
        if request.beams is not None:
            rows = [cm.beam_labels.index(label) for label in request.beams]
            cm = select_rows(cm, rows)
        result = solve(request.solver, cm, np.asarray(request.y, dtype=float), config.solver)
    except (LscmError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))

    labels = cm.labels()
    payload = result.to_dict()
    return SolveResponse(
        config_hash=config_hash(config),
        solver=request.solver,
        x_hat=payload["x_hat"],
        support=payload["support"],
        support_labels=[labels[n] for n in result.support],
        residual_norms=payload["residual_norms"],
        termination=payload["termination"],
        iterations=payload["iterations"],
        lasso_lambda=result.lasso_lambda,
    )

@app.post("/api/measurements/upload", response_model=UploadResponse)
async def upload_measurements(file: UploadFile = File(...)):
    """
    Upload a drive-test CSV and return the per-grid linear averages.

    Expected header: grid_id,cell_id,beam_id,rsrp_db[,timestamp]
    """
    if file.filename and not file.filename.endswith(".csv"):
        raise HTTPException(status_code=400, detail="Unsupported file format")
    content = await file.read()
    try:
        grids = ingest_measurements(content)
    except (LscmError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"filename": file.filename, "grids": [gm.to_dict() for gm in grids]}

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
