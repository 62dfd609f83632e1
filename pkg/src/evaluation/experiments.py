"""
LSCM Toolkit - Experiments

Support-recovery accuracy sweeps over the number of angular cells N, the
number of beams M and the sparsity K, and the report type shared with the
rotation protocol.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from loguru import logger

from src.evaluation.metrics import support_accuracy
from src.modeling.coefficient_matrix import CoefficientMatrix, select_rows, top_n_columns
from src.optimization.dispatch import SOLVER_NAMES, solve
from src.optimization.solver_types import SolverConfig
from src.simulation.channel_simulator import ValueDistribution, generate_ground_truth
from src.simulation.random_streams import stream

ACCURACY_COLUMNS = ["sweep_var", "value", "solver", "mean_accuracy", "std", "trials"]
MAE_COLUMNS = ["cellclass", "n_grids", "solver", "mae_db"]


@dataclass(frozen=True)
class ExperimentSpec:
    """
    One accuracy sweep.

    Attributes:
        sweep_var: ``N``, ``M`` or ``K``.
        values: Values taken by the sweep variable.
        n, m, k: Fixed values of the other two variables.
        trials: Random instances per sweep point.
        solvers: Solver names to compare.
        seed: Root seed; trial t of point p draws from stream(seed, p, t).
        value_dist: Distribution of the true path powers.
        noise_std: Relative Gaussian noise on y (0 keeps y = A x exact).
        beam_subset: ``spread`` (evenly spaced beams) or ``random`` per trial.
        n_jobs: Parallel workers over trials.
    """

    sweep_var: str
    values: Tuple[int, ...]
    n: int = 400
    m: int = 32
    k: int = 5
    trials: int = 200
    solvers: Tuple[str, ...] = SOLVER_NAMES
    seed: int = 0
    value_dist: ValueDistribution = field(default_factory=ValueDistribution)
    noise_std: float = 0.0
    beam_subset: str = "spread"
    n_jobs: int = 1

    def __post_init__(self):
        if self.sweep_var not in ("N", "M", "K"):
            raise ValueError(f"sweep variable must be N, M or K, got {self.sweep_var}")
        values = tuple(int(v) for v in self.values)
        if not values or any(v < 1 for v in values):
            raise ValueError(f"sweep values must be positive integers, got {self.values}")
        object.__setattr__(self, "values", values)
        if min(self.n, self.m, self.k) < 1:
            raise ValueError("N, M and K must be positive")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        unknown = set(self.solvers) - set(SOLVER_NAMES)
        if unknown or not self.solvers:
            raise ValueError(f"unknown solvers: {sorted(unknown)}")
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if self.beam_subset not in ("spread", "random"):
            raise ValueError(f"beam subset must be 'spread' or 'random', got {self.beam_subset}")

    def point(self, value: int) -> Tuple[int, int, int]:
        """(N, M, K) at a sweep value."""
        n, m, k = self.n, self.m, self.k
        if self.sweep_var == "N":
            n = value
        elif self.sweep_var == "M":
            m = value
        else:
            k = value
        return n, m, k


@dataclass
class EvalReport:
    """
    Tabular evaluation output.

    ``kind`` is ``accuracy`` (rows keyed by sweep value and solver) or ``mae``
    (rows keyed by cell class and solver).
    """

    kind: str
    rows: List[Dict[str, Any]]
    sweep_var: Optional[str] = None

    def to_dataframe(self) -> pd.DataFrame:
        columns = ACCURACY_COLUMNS if self.kind == "accuracy" else MAE_COLUMNS
        return pd.DataFrame(self.rows, columns=columns)

    def save_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_dataframe().to_csv(path, index=False, float_format="%.17g")
        return path

    def save_json(self, path, config_hash: Optional[str] = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {"config_hash": config_hash, "kind": self.kind, "sweep_var": self.sweep_var, "rows": self.rows}
        with open(path, "w") as f:
            json.dump(payload, f, indent=2)
        return path

    def value(self, key, solver: str, column: str):
        """Look up one cell, keyed by sweep value (accuracy) or cell class (mae)."""
        key_column = "value" if self.kind == "accuracy" else "cellclass"
        for row in self.rows:
            if row[key_column] == key and row["solver"] == solver:
                return row[column]
        raise KeyError(f"no row for {key_column}={key}, solver={solver}")


def spread_rows(total: int, count: int) -> List[int]:
    """count beam rows spread evenly over 0..total-1, first and last included."""
    if not 1 <= count <= total:
        raise ValueError(f"cannot pick {count} of {total} beams")
    return [int(m) for m in np.linspace(0, total - 1, count).round()]


def _check_dimensions(spec: ExperimentSpec, matrix: CoefficientMatrix):
    for value in spec.values:
        n, m, k = spec.point(value)
        if n > matrix.n_columns:
            raise ValueError(f"N={n} exceeds the {matrix.n_columns} available columns")
        if m > matrix.codebook_size:
            raise ValueError(f"M={m} exceeds the {matrix.codebook_size} available beams")
        if k > n:
            raise ValueError(f"K={k} exceeds N={n}")


def _run_trial(spec: ExperimentSpec, restricted: CoefficientMatrix, point: int, trial: int, m: int, k: int, solver_cfg: SolverConfig) -> Dict[str, float]:
    rng = stream(spec.seed, point, trial)
    if spec.beam_subset == "random":
        rows = sorted(int(r) for r in rng.choice(restricted.codebook_size, size=m, replace=False))
    else:
        rows = spread_rows(restricted.codebook_size, m)
    a = select_rows(restricted, rows) if m < restricted.codebook_size else restricted

    candidates = np.flatnonzero(a.valid_columns)
    truth = generate_ground_truth(a.n_columns, k, rng, spec.value_dist, candidates=candidates)
    y = a.expected_rsrp(truth.x)
    if spec.noise_std > 0:
        y = np.maximum(y * (1.0 + spec.noise_std * rng.standard_normal(y.size)), 0.0)

    cfg = solver_cfg.model_copy(update={"k_max": k})
    return {name: support_accuracy(solve(name, a, y, cfg).support, truth.support) for name in spec.solvers}


def run_accuracy_sweep(spec: ExperimentSpec, matrix: CoefficientMatrix, solver_cfg: Optional[SolverConfig] = None) -> EvalReport:
    """
    Mean support-recovery accuracy per sweep value and solver.

    For every sweep value the matrix is restricted to its N largest-norm
    columns and M beams, and each trial draws a K-sparse truth over the
    restricted columns, forms y = A x and runs every solver.

    Args:
        spec: Sweep definition.
        matrix: Full coefficient matrix of the scenario.
        solver_cfg: Base solver configuration; K is overridden per point.

    Returns:
        EvalReport: ``accuracy`` rows ordered by sweep value then solver.

    Raises:
        ValueError: If a sweep value exceeds the available dimensions.
    """
    solver_cfg = solver_cfg or SolverConfig()
    _check_dimensions(spec, matrix)

    rows = []
    for point, value in enumerate(spec.values):
        n, m, k = spec.point(value)
        restricted, _ = top_n_columns(matrix, n)
        logger.info(f"Sweep {spec.sweep_var}={value}: N={n}, M={m}, K={k}, {spec.trials} trials")

        if spec.n_jobs == 1:
            outcomes = [_run_trial(spec, restricted, point, t, m, k, solver_cfg) for t in range(spec.trials)]
        else:
            outcomes = Parallel(n_jobs=spec.n_jobs)(
                delayed(_run_trial)(spec, restricted, point, t, m, k, solver_cfg) for t in range(spec.trials)
            )

        for name in spec.solvers:
            scores = np.array([outcome[name] for outcome in outcomes])
            rows.append({
                "sweep_var": spec.sweep_var,
                "value": value,
                "solver": name,
                "mean_accuracy": float(scores.mean()),
                "std": float(scores.std()),
                "trials": spec.trials,
            })
    return EvalReport("accuracy", rows, spec.sweep_var)
