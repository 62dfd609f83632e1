#!/usr/bin/env python3
"""
LSCM Toolkit - Main Entry Point

Command-line front end: build the coefficient matrix, simulate RSRP traces,
recover sparse angular power spectra, run accuracy sweeps and evaluate RSRP
prediction after array rotation.
"""

import argparse
import sys
from pathlib import Path

from loguru import logger

from src.config.logging_config import configure_logging
from src.config.scenario_config import ScenarioConfig, load_config, load_environment, output_dir
from src.errors import LscmError
from src.pipeline import COMMANDS, run_pipeline


def parse_values(text):
    """Comma-separated positive integers, e.g. ``8,16,24,32``."""
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None
    if not values:
        raise argparse.ArgumentTypeError("at least one value is required")
    return values


def build_parser():
    parser = argparse.ArgumentParser(prog="lscm", description="Large-scale channel model toolkit")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    helps = {
        "build-matrix": "Build the coefficient matrix and its column norms",
        "simulate": "Simulate per-beam RSRP traces for synthetic grids",
        "solve": "Recover angular power spectra from measured or synthetic RSRP",
        "sweep": "Run a support-recovery accuracy sweep",
        "rotate-eval": "Evaluate RSRP prediction after array rotation",
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=helps[command])
        sub.add_argument("--config", type=str, help="Scenario JSON file (defaults apply when omitted)")
        sub.add_argument("--seed", type=int, help="Override the config seed")
        sub.add_argument("--out", type=str, help="Output directory (default: LSCM_OUTPUT_DIR or data/output)")
        sub.add_argument("--log-level", type=str, help="Log level (default: LSCM_LOG_LEVEL or INFO)")
        if command in ("solve", "rotate-eval"):
            sub.add_argument("--solver", choices=["nnomp", "wnomp", "lasso"], help="Solver to run")
        if command == "solve":
            sub.add_argument("--input", type=str, help="Measurement CSV (grid_id,cell_id,beam_id,rsrp_db[,timestamp])")
        if command == "sweep":
            sub.add_argument("--var", choices=["N", "M", "K"], help="Sweep variable")
            sub.add_argument("--values", type=parse_values, help="Comma-separated sweep values")
            sub.add_argument("--trials", type=int, help="Trials per sweep point")
            sub.add_argument("--plot", action="store_true", help="Also write an accuracy curve figure")
    return parser


def main(argv=None):
    """Parse arguments, run one command and return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2

    load_environment()
    configure_logging(args.log_level)
    try:
        config = load_config(args.config) if args.config else ScenarioConfig()
        if args.seed is not None:
            if args.seed < 0:
                raise ValueError(f"seed must be non-negative, got {args.seed}")
            config = config.model_copy(update={"seed": args.seed})
        run_pipeline(
            args.command,
            config,
            Path(args.out) if args.out else output_dir(),
            solver=getattr(args, "solver", None),
            var=getattr(args, "var", None),
            values=getattr(args, "values", None),
            trials=getattr(args, "trials", None),
            plot=getattr(args, "plot", False),
            input_path=Path(args.input) if getattr(args, "input", None) else None,
        )
    except (LscmError, ValueError, FileNotFoundError) as exc:
        logger.error(str(exc))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
