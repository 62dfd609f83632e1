"""
LSCM Toolkit - Solver Types

Configuration and result types shared by the sparse non-negative solvers.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.errors import DimensionError
from src.modeling.coefficient_matrix import CoefficientMatrix

KKT_STOP = "kkt_stop"
SPARSITY_REACHED = "sparsity_reached"
MAX_ITER = "max_iter"
STALL = "stall"
CONVERGED = "converged"

TERMINATIONS = (KKT_STOP, SPARSITY_REACHED, MAX_ITER, STALL, CONVERGED)


class SolverConfig(BaseModel):
    """
    Parameters of the sparse recovery solvers.

    ``stop_tol`` and ``max_iter`` left unset resolve per problem: the stop
    tolerance to 1e-12 * max|A^T y| and the greedy iteration cap to 4 K.
    An unset ``lasso_lambda`` is chosen by ``select_lasso_lambda``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    k_max: int = Field(5, ge=1)
    stop_tol: Optional[float] = Field(None, ge=0)
    max_iter: Optional[int] = Field(None, ge=1)
    nnls_max_iter: Optional[int] = Field(None, ge=1)
    lasso_lambda: Optional[float] = Field(None, ge=0)
    lasso_step: Literal["fixed", "backtracking"] = "fixed"
    lasso_step_size: Optional[float] = Field(None, gt=0)
    lasso_accelerated: bool = False
    lasso_max_iter: int = Field(5000, ge=1)
    lasso_tol: float = Field(1e-10, ge=0)
    lasso_path_length: int = Field(30, ge=2)
    lasso_path_ratio: float = Field(1e-4, gt=0, lt=1)
    support_eps: float = Field(1e-8, ge=0)


@dataclass(frozen=True)
class SolverResult:
    """
    Output of a solver run.

    Attributes:
        x_hat: Non-negative estimate over the matrix columns.
        support: supp(x_hat), sorted.
        residual_norms: ||y - A x|| before the first and after every accepted iteration.
        termination: One of TERMINATIONS.
        iterations: Accepted iterations.
        selected: Column chosen at each accepted iteration (greedy solvers).
        solver: Solver name.
        lasso_lambda: Regularization weight used (LASSO only).
    """

    x_hat: np.ndarray
    support: Tuple[int, ...]
    residual_norms: List[float]
    termination: str
    iterations: int
    selected: Tuple[int, ...] = ()
    solver: str = ""
    lasso_lambda: Optional[float] = None

    def __post_init__(self):
        if self.termination not in TERMINATIONS:
            raise ValueError(f"unknown termination '{self.termination}', expected one of {TERMINATIONS}")

    @classmethod
    def build(cls, x_hat: np.ndarray, residual_norms: Sequence[float], termination: str, iterations: int, **kwargs) -> "SolverResult":
        x_hat = np.array(x_hat, dtype=float)
        x_hat.setflags(write=False)
        support = tuple(int(n) for n in np.flatnonzero(x_hat > 0))
        return cls(x_hat, support, [float(v) for v in residual_norms], termination, int(iterations), **kwargs)

    @property
    def residual_norm(self) -> float:
        return self.residual_norms[-1]

    def to_dict(self, column_index: Optional[Sequence[int]] = None) -> Dict[str, Any]:
        """
        JSON-ready view with a sparse ``{index: value}`` x_hat.

        When ``column_index`` is given, the support is also reported as
        flattened grid cells.
        """
        payload = {
            "solver": self.solver,
            "x_hat": {str(n): float(self.x_hat[n]) for n in self.support},
            "support": list(self.support),
            "residual_norms": list(self.residual_norms),
            "termination": self.termination,
            "iterations": self.iterations,
            "selected": list(self.selected),
        }
        if self.lasso_lambda is not None:
            payload["lasso_lambda"] = self.lasso_lambda
        if column_index is not None:
            payload["support_cells"] = [int(column_index[n]) for n in self.support]
        return payload


def matrix_arrays(a) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, A_hat, column norms) of a CoefficientMatrix or a plain 2-D array."""
    if isinstance(a, CoefficientMatrix):
        return a.a, a.a_hat, a.col_norms
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"matrix must be 2-D, got shape {a.shape}")
    norms = np.linalg.norm(a, axis=0)
    a_hat = np.zeros_like(a)
    valid = norms > 0
    a_hat[:, valid] = a[:, valid] / norms[valid]
    return a, a_hat, norms


def check_measurement(y, n_rows: int) -> np.ndarray:
    """Validate y against the number of beams."""
    y = np.asarray(y, dtype=float)
    if y.shape != (n_rows,):
        raise DimensionError(f"y has shape {y.shape}, expected ({n_rows},)")
    if not np.all(np.isfinite(y)):
        raise ValueError("y must be finite")
    return y


def resolve_stop_tol(cfg: SolverConfig, a: np.ndarray, y: np.ndarray) -> float:
    if cfg.stop_tol is not None:
        return cfg.stop_tol
    return 1e-12 * float(np.max(np.abs(a.T @ y), initial=0.0))
