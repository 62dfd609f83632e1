"""
LSCM Toolkit - Plotting

Accuracy-versus-sweep-value curves for accuracy reports.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from src.evaluation.experiments import EvalReport  # noqa: E402

_MARKERS = {"nnomp": "o", "wnomp": "s", "lasso": "^"}


def plot_accuracy_curves(report: EvalReport, path) -> Path:
    """
    Draw one mean-accuracy curve per solver against the sweep value.

    Args:
        report: An ``accuracy`` report.
        path: Output image path; the suffix picks the format.

    Returns:
        Path: The written figure.
    """
    if report.kind != "accuracy":
        raise ValueError(f"cannot plot a '{report.kind}' report as accuracy curves")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = report.to_dataframe()

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for solver, group in df.groupby("solver", sort=False):
        group = group.sort_values("value")
        ax.plot(group["value"], group["mean_accuracy"], marker=_MARKERS.get(solver, "x"), label=solver.upper())
    ax.set_xlabel(report.sweep_var or "value")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
