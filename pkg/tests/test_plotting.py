"""
Tests for accuracy curve plots.
"""

import pytest

from src.evaluation.experiments import EvalReport
from src.evaluation.plotting import plot_accuracy_curves


def test_plot_writes_png(tmp_path):
    rows = [
        {"sweep_var": "N", "value": v, "solver": s, "mean_accuracy": acc, "std": 0.1, "trials": 10}
        for v, acc in ((100, 0.9), (200, 0.8))
        for s in ("nnomp", "wnomp")
    ]
    path = plot_accuracy_curves(EvalReport("accuracy", rows, "N"), tmp_path / "figs" / "sweep.png")
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_plot_rejects_mae_reports(tmp_path):
    with pytest.raises(ValueError):
        plot_accuracy_curves(EvalReport("mae", []), tmp_path / "mae.png")
