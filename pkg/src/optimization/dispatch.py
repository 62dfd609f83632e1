"""
LSCM Toolkit - Solver Dispatch

Single entry point used by the pipeline, the service and the sweep harness.
"""

from src.optimization.greedy_pursuit import nnomp, wnomp
from src.optimization.lasso import lasso_nn, select_lasso_lambda
from src.optimization.solver_types import SolverConfig, SolverResult

SOLVER_NAMES = ("nnomp", "wnomp", "lasso")


def solve(name: str, a, y, cfg: SolverConfig) -> SolverResult:
    """
    Run a solver by name.

    For ``lasso`` an unset ``cfg.lasso_lambda`` is chosen per instance by
    select_lasso_lambda.

    Raises:
        ValueError: For an unknown solver name.
    """
    if name == "nnomp":
        return nnomp(a, y, cfg)
    if name == "wnomp":
        return wnomp(a, y, cfg)
    if name == "lasso":
        lam = cfg.lasso_lambda if cfg.lasso_lambda is not None else select_lasso_lambda(a, y, cfg)
        return lasso_nn(a, y, lam, cfg)
    raise ValueError(f"unknown solver '{name}', expected one of {', '.join(SOLVER_NAMES)}")
