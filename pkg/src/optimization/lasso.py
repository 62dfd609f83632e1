"""
LSCM Toolkit - Non-negative LASSO

Baseline solver for

    min_x 1/2 ||A x - y||^2 + lambda sum(x)   s.t. x >= 0

by proximal gradient descent. The proximal step of the non-negative l1 term
is the one-sided soft threshold max(0, v - eta * lambda).
"""

from typing import Optional, Tuple

import numpy as np
from loguru import logger

from src.errors import SolverDivergenceError
from src.optimization.solver_types import (
    CONVERGED,
    MAX_ITER,
    SolverConfig,
    SolverResult,
    check_measurement,
    matrix_arrays,
)


def _objective(a: np.ndarray, y: np.ndarray, x: np.ndarray, lam: float) -> float:
    r = a @ x - y
    return 0.5 * float(r @ r) + lam * float(x.sum())


def _prox(v: np.ndarray, threshold: float) -> np.ndarray:
    return np.maximum(v - threshold, 0.0)


def lipschitz_constant(a: np.ndarray) -> float:
    """L = ||A||_2^2, the Lipschitz constant of the smooth part's gradient."""
    return float(np.linalg.norm(a, 2) ** 2)


def _proximal_gradient(
    a: np.ndarray,
    y: np.ndarray,
    lam: float,
    cfg: SolverConfig,
    x0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, list, str, int]:
    n_cols = a.shape[1]
    x = np.zeros(n_cols) if x0 is None else np.array(x0, dtype=float)
    lipschitz = lipschitz_constant(a)
    if lipschitz == 0.0:
        return x * 0.0, [float(np.linalg.norm(y))], CONVERGED, 0

    step = cfg.lasso_step_size or 1.0 / lipschitz
    objective = _objective(a, y, x, lam)
    residual_norms = [float(np.linalg.norm(a @ x - y))]
    v, x_prev, t = x.copy(), x.copy(), 1.0

    for iteration in range(cfg.lasso_max_iter):
        momentum = not np.array_equal(v, x)
        gradient = a.T @ (a @ v - y)
        x_new = _prox(v - step * gradient, step * lam)

        if cfg.lasso_step == "backtracking":
            smooth_v = 0.5 * float((a @ v - y) @ (a @ v - y))
            while True:
                diff = x_new - v
                smooth_new = 0.5 * float((a @ x_new - y) @ (a @ x_new - y))
                if smooth_new <= smooth_v + float(gradient @ diff) + float(diff @ diff) / (2.0 * step) + 1e-15 * abs(smooth_v):
                    break
                step *= 0.5
                x_new = _prox(v - step * gradient, step * lam)

        objective_new = _objective(a, y, x_new, lam)
        if objective_new > objective * (1.0 + 1e-12) + 1e-300:
            if momentum:
                # restart momentum from the last iterate
                v, t = x.copy(), 1.0
                continue
            if cfg.lasso_step == "fixed":
                raise SolverDivergenceError(
                    f"objective increased from {objective:.6g} to {objective_new:.6g} with fixed step {step:.6g} "
                    f"(1/L = {1.0 / lipschitz:.6g}); use lasso_step='backtracking' or a smaller step"
                )

        change = abs(objective - objective_new)
        x_prev, x = x, x_new
        objective = objective_new
        residual_norms.append(float(np.linalg.norm(a @ x - y)))

        if cfg.lasso_accelerated:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            v = x + ((t - 1.0) / t_next) * (x - x_prev)
            t = t_next
        else:
            v = x

        if change <= cfg.lasso_tol * max(abs(objective), 1e-300) or np.array_equal(x, x_prev):
            return x, residual_norms, CONVERGED, iteration + 1

    return x, residual_norms, MAX_ITER, cfg.lasso_max_iter


def threshold_support(x: np.ndarray, k_max: int, support_eps: float) -> np.ndarray:
    """
    Zero entries at or below support_eps * max(x) and keep the k_max largest.

    Ties in value keep the lower index.
    """
    x = np.asarray(x, dtype=float)
    peak = float(np.max(x, initial=0.0))
    if peak <= 0.0:
        return np.zeros_like(x)
    keep = np.flatnonzero(x > support_eps * peak)
    if keep.size > k_max:
        order = np.lexsort((keep, -x[keep]))
        keep = keep[order[:k_max]]
    out = np.zeros_like(x)
    out[keep] = x[keep]
    return out


def lasso_nn(a, y, lambda_reg: float, cfg: SolverConfig) -> SolverResult:
    """
    Non-negative LASSO by proximal gradient.

    Iterates until the relative objective change drops to ``cfg.lasso_tol``
    or ``cfg.lasso_max_iter`` is reached. The fixed step defaults to 1/L;
    ``lasso_step='backtracking'`` halves the step until the quadratic upper
    bound holds, and ``lasso_accelerated`` adds FISTA momentum with restart
    on objective increase.

    Args:
        a: CoefficientMatrix or 2-D array.
        y: Measurements, linear units.
        lambda_reg: l1 weight (>= 0).
        cfg: Solver configuration.

    Returns:
        SolverResult: Thresholded estimate with at most K non-zeros.

    Raises:
        SolverDivergenceError: If a fixed step increases the objective.
    """
    if lambda_reg < 0:
        raise ValueError(f"lambda must be non-negative, got {lambda_reg}")
    a_mat, _, _ = matrix_arrays(a)
    y = check_measurement(y, a_mat.shape[0])

    x, residual_norms, termination, iterations = _proximal_gradient(a_mat, y, lambda_reg, cfg)
    x_hat = threshold_support(x, cfg.k_max, cfg.support_eps)
    if not np.array_equal(x_hat, x):
        residual_norms.append(float(np.linalg.norm(a_mat @ x_hat - y)))
    logger.debug(f"lasso lambda={lambda_reg:.6g}: {termination} after {iterations} iterations")
    return SolverResult.build(x_hat, residual_norms, termination, iterations, solver="lasso", lasso_lambda=float(lambda_reg))


def lambda_max(a, y) -> float:
    """Smallest lambda for which x = 0 is optimal: max(A^T y), floored at 0."""
    a_mat, _, _ = matrix_arrays(a)
    return max(float(np.max(a_mat.T @ np.asarray(y, dtype=float))), 0.0)


def select_lasso_lambda(a, y, cfg: SolverConfig) -> float:
    """
    Pick lambda on a descending logarithmic path.

    The path runs from lambda_max = max(A^T y) down to
    ``lasso_path_ratio * lambda_max`` in ``lasso_path_length`` steps, each
    solve warm-started from the previous one. The result is the smallest
    lambda whose thresholded support has at most K entries.
    """
    a_mat, _, _ = matrix_arrays(a)
    y = check_measurement(y, a_mat.shape[0])
    top = lambda_max(a_mat, y)
    if top == 0.0:
        return 0.0

    path = top * np.logspace(0.0, np.log10(cfg.lasso_path_ratio), cfg.lasso_path_length)
    chosen = float(path[0])
    x = None
    for lam in path:
        x, _, _, _ = _proximal_gradient(a_mat, y, float(lam), cfg, x0=x)
        peak = float(np.max(x, initial=0.0))
        count = int(np.count_nonzero(x > cfg.support_eps * peak)) if peak > 0 else 0
        if count > cfg.k_max:
            break
        chosen = float(lam)
    logger.debug(f"Selected lasso lambda {chosen:.6g} (lambda_max {top:.6g})")
    return chosen
