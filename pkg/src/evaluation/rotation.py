"""
LSCM Toolkit - Array Rotation

Predicts per-beam RSRP after the array is rotated mechanically. A path that
leaves toward (tilt, azimuth) is seen by the rotated array at
(tilt - d_tilt, azimuth - d_azimuth), so the rotated coefficient matrix keeps
the original cell order while its phases and element gains are evaluated at
the shifted angles.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from src.array.codebook import BeamCodebook
from src.array.gain_pattern import GainPattern, sample_gain_pattern
from src.array.geometry import AngularGrid, ArrayConfig
from src.errors import CoverageError, DimensionError
from src.evaluation.experiments import EvalReport
from src.evaluation.metrics import mae_db, to_db
from src.modeling.coefficient_matrix import CoefficientMatrix, build_matrix
from src.optimization.dispatch import solve
from src.optimization.solver_types import SolverConfig, matrix_arrays

CELL_CLASSES = ("serving", "neighborhood")


@dataclass(frozen=True)
class RotatedScenario:
    """Inputs of build_matrix for the rotated array; ``grid`` is in the array frame."""

    cfg: ArrayConfig
    grid: AngularGrid
    pattern: GainPattern
    codebook: BeamCodebook


@dataclass(frozen=True)
class RotationCase:
    """
    Pre- and post-rotation RSRP of one geographic grid.

    Masks flag the beams measured in each campaign; missing beams are
    dropped from the solve (before) or from the comparison (after).
    """

    grid_id: str
    cell_class: str
    y_before: np.ndarray
    y_after: np.ndarray
    mask_before: Optional[np.ndarray] = None
    mask_after: Optional[np.ndarray] = None


def rotate_scenario(
    cfg: ArrayConfig,
    grid: AngularGrid,
    codebook: BeamCodebook,
    azimuth_offset: float,
    tilt_offset: float,
    element,
) -> RotatedScenario:
    """
    Scenario seen by an array rotated by the given offsets, in degrees.

    Args:
        cfg: Array configuration.
        grid: Angular grid in the world frame.
        codebook: Beam codebook (fixed to the array).
        azimuth_offset: Azimuth rotation in degrees.
        tilt_offset: Tilt rotation in degrees.
        element: Element pattern providing ``amplitude`` and ``coverage``.

    Raises:
        CoverageError: If shifted angles leave the element pattern's coverage.
    """
    shifted = grid.shifted(tilt_offset, azimuth_offset)
    (tilt_low, tilt_high), (az_low, az_high) = element.coverage

    clipped = []
    for (t, a), (ts, az) in zip(_cell_angles(grid), _cell_angles(shifted)):
        if not (tilt_low <= ts <= tilt_high and az_low <= az <= az_high):
            clipped.append((t, a))
    if clipped:
        raise CoverageError(
            f"rotation by ({tilt_offset:g}, {azimuth_offset:g}) degrees moves {len(clipped)} cells out of coverage",
            clipped,
        )

    logger.info(f"Rotated scenario by tilt {tilt_offset:g} and azimuth {azimuth_offset:g} degrees")
    return RotatedScenario(cfg, shifted, sample_gain_pattern(element, shifted), codebook)


def _cell_angles(grid: AngularGrid):
    tilts, azimuths = grid.flat_angles()
    return zip(tilts.tolist(), azimuths.tolist())


def build_rotated_matrix(rotated: RotatedScenario, original_grid: AngularGrid, n_jobs: int = 1) -> CoefficientMatrix:
    """Coefficient matrix of the rotated array, columns labeled by the original cells."""
    cm = build_matrix(rotated.cfg, rotated.grid, rotated.pattern, rotated.codebook, n_jobs=n_jobs)
    return CoefficientMatrix.from_matrix(cm.a, original_grid, cm.column_index, cm.beam_labels)


def predict_rotated_rsrp(x_hat, a_rotated) -> np.ndarray:
    """Predicted post-rotation RSRP A_rot x_hat, linear units."""
    a_mat, _, _ = matrix_arrays(a_rotated)
    x_hat = np.asarray(x_hat, dtype=float)
    if x_hat.shape != (a_mat.shape[1],):
        raise DimensionError(f"x_hat has shape {x_hat.shape}, expected ({a_mat.shape[1]},)")
    return a_mat @ x_hat


def synthetic_rotation_cases(
    matrix: CoefficientMatrix,
    rotated: CoefficientMatrix,
    truths: Sequence[np.ndarray],
    cell_classes: Optional[Sequence[str]] = None,
) -> List[RotationCase]:
    """Noiseless cases y_before = A x, y_after = A_rot x for each true x."""
    cases = []
    for g, x in enumerate(truths):
        x = np.asarray(x, dtype=float)
        cell_class = cell_classes[g] if cell_classes is not None else "serving"
        cases.append(RotationCase(f"grid-{g}", cell_class, matrix.expected_rsrp(x), rotated.expected_rsrp(x)))
    return cases


def _solve_case(name: str, matrix: CoefficientMatrix, rotated: CoefficientMatrix, case: RotationCase, cfg: SolverConfig) -> float:
    n_beams = matrix.codebook_size
    before = np.ones(n_beams, dtype=bool) if case.mask_before is None else np.asarray(case.mask_before, dtype=bool)
    after = np.ones(n_beams, dtype=bool) if case.mask_after is None else np.asarray(case.mask_after, dtype=bool)
    if not before.any() or not after.any():
        raise ValueError(f"grid {case.grid_id} has no measured beams")

    result = solve(name, matrix.a[before], np.asarray(case.y_before)[before], cfg)
    predicted = predict_rotated_rsrp(result.x_hat, rotated.a[after])
    return mae_db(to_db(predicted), to_db(np.asarray(case.y_after)[after]))


def run_rotation_protocol(
    matrix: CoefficientMatrix,
    rotated: CoefficientMatrix,
    cases: Sequence[RotationCase],
    solvers: Sequence[str],
    cfg: SolverConfig,
) -> EvalReport:
    """
    MAE between predicted and observed post-rotation RSRP.

    Each case is solved on its pre-rotation RSRP with the original matrix,
    predicted with the rotated matrix and compared in dB. Rows give the mean
    per-grid MAE of each cell class and of all grids.

    Returns:
        EvalReport: ``mae`` rows with columns cellclass, n_grids, solver, mae_db.
    """
    if matrix.a.shape != rotated.a.shape:
        raise DimensionError(f"matrices disagree: {matrix.a.shape} and {rotated.a.shape}")
    if not cases:
        raise ValueError("at least one grid is required")

    per_solver: Dict[str, List[float]] = {name: [_solve_case(name, matrix, rotated, case, cfg) for case in cases] for name in solvers}
    classes = [case.cell_class for case in cases]

    rows = []
    ordered = [c for c in CELL_CLASSES if c in classes] + sorted(set(classes) - set(CELL_CLASSES))
    for cell_class in ordered + ["all"]:
        members = [i for i, c in enumerate(classes) if cell_class == "all" or c == cell_class]
        for name in solvers:
            rows.append({
                "cellclass": cell_class,
                "n_grids": len(members),
                "solver": name,
                "mae_db": float(np.mean([per_solver[name][i] for i in members])),
            })
    return EvalReport("mae", rows)
