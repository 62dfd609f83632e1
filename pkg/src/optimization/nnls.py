"""
LSCM Toolkit - Non-negative Least Squares

Restricted NNLS subproblem min ||y - A_S z||_2 s.t. z >= 0, solved with the
Lawson-Hanson active-set method from scipy.
"""

import numpy as np
from scipy.optimize import nnls as _scipy_nnls

from src.errors import DimensionError, NNLSConvergenceError


def nnls(a_sub: np.ndarray, y: np.ndarray, max_iter: int = None) -> np.ndarray:
    """
    Non-negative least-squares fit of y on the columns of a_sub.

    Args:
        a_sub: Matrix of shape (M, |S|), |S| >= 1.
        y: Vector of length M.
        max_iter: Active-set iteration cap (scipy default 3 |S| when None).

    Returns:
        Non-negative vector of length |S|.

    Raises:
        DimensionError: If the shapes disagree.
        NNLSConvergenceError: If the iteration cap is hit.
    """
    a_sub = np.asarray(a_sub, dtype=float)
    y = np.asarray(y, dtype=float)
    if a_sub.ndim != 2 or a_sub.shape[1] == 0:
        raise DimensionError(f"NNLS needs a non-empty 2-D matrix, got shape {a_sub.shape}")
    if y.shape != (a_sub.shape[0],):
        raise DimensionError(f"y has shape {y.shape}, expected ({a_sub.shape[0]},)")

    n_rows, n_cols = a_sub.shape
    try:
        z, _ = _scipy_nnls(a_sub, y, maxiter=max_iter)
    except RuntimeError as exc:
        raise NNLSConvergenceError(str(exc), n_rows, n_cols, max_iter or 3 * n_cols) from exc
    return np.maximum(z, 0.0)


def kkt_residual(a_sub: np.ndarray, y: np.ndarray, z: np.ndarray) -> float:
    """
    Largest violation of the NNLS optimality conditions at z.

    Checks z >= 0, gradient g = A^T (A z - y) >= 0 and complementary
    slackness z * g = 0; returns the worst absolute violation.
    """
    a_sub = np.asarray(a_sub, dtype=float)
    z = np.asarray(z, dtype=float)
    gradient = a_sub.T @ (a_sub @ z - np.asarray(y, dtype=float))
    violations = (
        np.max(np.maximum(-z, 0.0), initial=0.0),
        np.max(np.maximum(-gradient, 0.0), initial=0.0),
        np.max(np.abs(z * gradient), initial=0.0),
    )
    return float(max(violations))
