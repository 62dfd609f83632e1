#!/usr/bin/env python3
"""
Redraw accuracy curves from a sweep_<var>.csv written by ``lscm sweep``.

Usage: python scripts/plot_accuracy_sweep.py data/output/sweep_N.csv [figure.png]
"""

import os
import sys
from pathlib import Path

import pandas as pd
from loguru import logger

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.evaluation.experiments import ACCURACY_COLUMNS, EvalReport  # noqa: E402
from src.evaluation.plotting import plot_accuracy_curves  # noqa: E402


def main(argv):
    if not argv:
        logger.error("usage: plot_accuracy_sweep.py SWEEP_CSV [FIGURE]")
        return 2
    csv_path = Path(argv[0])
    figure = Path(argv[1]) if len(argv) > 1 else csv_path.with_suffix(".png")
    df = pd.read_csv(csv_path)
    missing = set(ACCURACY_COLUMNS) - set(df.columns)
    if missing:
        logger.error(f"{csv_path} is not a sweep report, missing {sorted(missing)}")
        return 1
    report = EvalReport("accuracy", df[ACCURACY_COLUMNS].to_dict("records"), str(df["sweep_var"].iloc[0]))
    logger.info(f"Wrote {plot_accuracy_curves(report, figure)}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
