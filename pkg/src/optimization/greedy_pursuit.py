"""
LSCM Toolkit - Greedy Pursuit

Non-negative orthogonal matching pursuit (NNOMP) and its weighted variant
(WNOMP) for recovering a K-sparse non-negative x from y = A x.

NNOMP selects the column with the largest unnormalized correlation a_n^T r.
WNOMP scores columns by (a_n / ||a_n||)^T r + lambda_k ||a_n|| with

    lambda_k = ||A_hat^T r_k||_2 / sum_n ||a_n||_2

recomputed from the current residual, and compresses the support to
supp(x) after every NNLS fit.
"""

from typing import Callable, List

import numpy as np
from loguru import logger

from src.optimization.nnls import nnls
from src.optimization.solver_types import (
    KKT_STOP,
    MAX_ITER,
    SPARSITY_REACHED,
    STALL,
    SolverConfig,
    SolverResult,
    check_measurement,
    matrix_arrays,
    resolve_stop_tol,
)


def selection_scores(a_hat: np.ndarray, col_norms: np.ndarray, residual: np.ndarray) -> np.ndarray:
    """
    WNOMP selection score of every column; zero-norm columns score -inf.
    """
    valid = col_norms > 0
    correlation = a_hat.T @ residual
    total_norm = float(col_norms.sum())
    weight = float(np.linalg.norm(correlation)) / total_norm if total_norm > 0 else 0.0
    scores = correlation + weight * col_norms
    return np.where(valid, scores, -np.inf)


def _pursuit(a, y, cfg: SolverConfig, name: str, score: Callable, compress: bool) -> SolverResult:
    a_mat, a_hat, col_norms = matrix_arrays(a)
    y = check_measurement(y, a_mat.shape[0])
    n_cols = a_mat.shape[1]
    valid = col_norms > 0
    stop_tol = resolve_stop_tol(cfg, a_mat, y)
    max_iter = cfg.max_iter or 4 * cfg.k_max

    x = np.zeros(n_cols)
    support: List[int] = []
    selected: List[int] = []
    residual = y.copy()
    residual_norms = [float(np.linalg.norm(residual))]
    termination = MAX_ITER

    for iteration in range(max_iter):
        correlation = np.where(valid, a_mat.T @ residual, -np.inf)
        if not np.max(correlation, initial=-np.inf) > stop_tol:
            termination = KKT_STOP
            break

        # argmax returns the lowest index among ties
        best = int(np.argmax(score(a_mat, a_hat, col_norms, residual, correlation)))
        trial = sorted(set(support) | {best})
        x_new = np.zeros(n_cols)
        x_new[trial] = nnls(a_mat[:, trial], y, cfg.nnls_max_iter)
        residual_new = y - a_mat @ x_new
        norm_new = float(np.linalg.norm(residual_new))

        if not norm_new < residual_norms[-1]:
            logger.warning(f"{name} stalled at iteration {iteration} selecting column {best}")
            termination = STALL
            break

        x, residual = x_new, residual_new
        support = [int(n) for n in np.flatnonzero(x > 0)] if compress else trial
        selected.append(best)
        residual_norms.append(norm_new)
        logger.debug(f"{name} iteration {iteration}: column {best}, |S|={len(support)}, residual {norm_new:.6g}")

        if len(support) >= cfg.k_max:
            termination = SPARSITY_REACHED
            break

    return SolverResult.build(x, residual_norms, termination, len(selected), selected=tuple(selected), solver=name)


def _correlation_score(a_mat, a_hat, col_norms, residual, correlation):
    return correlation


def _weighted_score(a_mat, a_hat, col_norms, residual, correlation):
    return selection_scores(a_hat, col_norms, residual)


def nnomp(a, y, cfg: SolverConfig) -> SolverResult:
    """
    Non-negative OMP.

    Each iteration picks argmax_n a_n^T r, adds it to S, refits x on S by
    NNLS and updates the residual. Stops when max(A^T r) <= stop_tol
    (``kkt_stop``), when |S| reaches K (``sparsity_reached``), when the
    residual fails to decrease (``stall``) or at the iteration cap.

    Args:
        a: CoefficientMatrix or 2-D array of shape (M, N).
        y: Expected RSRP per beam, linear units.
        cfg: Solver configuration.

    Returns:
        SolverResult: Estimate with ||x_hat||_0 <= K.
    """
    return _pursuit(a, y, cfg, "nnomp", _correlation_score, compress=False)


def wnomp(a, y, cfg: SolverConfig) -> SolverResult:
    """
    Weighted non-negative OMP.

    Same loop as NNOMP with the weighted selection score and S replaced by
    supp(x) after every NNLS fit, so the run may take more than K
    iterations; ``max_iter`` (default 4 K) bounds it.
    """
    return _pursuit(a, y, cfg, "wnomp", _weighted_score, compress=True)
