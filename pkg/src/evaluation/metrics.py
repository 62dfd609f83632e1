"""
LSCM Toolkit - Metrics

Unit conversions and the two evaluation metrics: support-recovery accuracy
and mean absolute error between RSRP vectors in dB.
"""

from typing import Iterable

import numpy as np

from src.errors import DimensionError

DB_FLOOR = -200.0


def to_db(linear) -> np.ndarray:
    """10 log10(v), clipped at DB_FLOOR for zero or tiny powers."""
    linear = np.asarray(linear, dtype=float)
    if np.any(linear < 0):
        raise ValueError("linear power must be non-negative")
    with np.errstate(divide="ignore"):
        return np.maximum(10.0 * np.log10(linear), DB_FLOOR)


def to_linear(db) -> np.ndarray:
    """10 ** (dB / 10)."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def support_accuracy(x_hat_support: Iterable[int], truth_support: Iterable[int]) -> float:
    """
    |S_hat & S| / |S|, the fraction of true paths recovered.

    Raises:
        ValueError: If the true support is empty.
    """
    truth = {int(n) for n in truth_support}
    if not truth:
        raise ValueError("true support must not be empty")
    estimate = {int(n) for n in x_hat_support}
    return len(estimate & truth) / len(truth)


def mae_db(y_pred_db, y_meas_db) -> float:
    """Mean absolute difference of two dB-scale vectors."""
    y_pred_db = np.asarray(y_pred_db, dtype=float)
    y_meas_db = np.asarray(y_meas_db, dtype=float)
    if y_pred_db.ndim != 1 or y_pred_db.shape != y_meas_db.shape:
        raise DimensionError(f"cannot compare shapes {y_pred_db.shape} and {y_meas_db.shape}")
    if y_pred_db.size == 0:
        raise ValueError("at least one beam is required")
    return float(np.mean(np.abs(y_pred_db - y_meas_db)))
