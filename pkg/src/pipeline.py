"""
LSCM Toolkit - Pipeline

Builds a scenario from a validated config and runs the command-line
workflows: matrix construction, RSRP simulation, solving, accuracy sweeps and
the rotation MAE protocol. Every run writes its artifacts plus a
``manifest.json`` listing the config hash, the seed and the SHA-256 of each
artifact.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from src.array.codebook import BeamCodebook, load_codebook, make_dft_codebook, steer_grid
from src.array.gain_pattern import (
    GainPattern,
    IsotropicElementPattern,
    ParabolicElementPattern,
    load_gain_table,
    sample_gain_pattern,
)
from src.array.geometry import SPEED_OF_LIGHT, AngularGrid, ArrayConfig
from src.config.scenario_config import ScenarioConfig, config_hash
from src.errors import DimensionError
from src.evaluation.experiments import EvalReport, ExperimentSpec, run_accuracy_sweep
from src.evaluation.metrics import support_accuracy
from src.evaluation.plotting import plot_accuracy_curves
from src.evaluation.rotation import (
    RotationCase,
    build_rotated_matrix,
    rotate_scenario,
    run_rotation_protocol,
    synthetic_rotation_cases,
)
from src.modeling.coefficient_matrix import (
    CoefficientMatrix,
    build_matrix,
    save_matrix_csv,
    save_matrix_json,
    select_rows,
)
from src.optimization.dispatch import solve
from src.processing.measurement_ingestion import GridMeasurement, ingest_measurements
from src.simulation.channel_simulator import (
    GroundTruthAps,
    ShadowingParams,
    ValueDistribution,
    estimate_expected_rsrp,
    export_trace,
    generate_ground_truth,
)
from src.simulation.random_streams import stream

COMMANDS = ("build-matrix", "simulate", "solve", "sweep", "rotate-eval")

# First stream counter of each randomness consumer under the run seed.
STREAM_TRUTH = 0
STREAM_SIMULATION = 1
STREAM_ROTATION = 2


@dataclass(frozen=True)
class Scenario:
    """Model objects built from a ScenarioConfig."""

    config: ScenarioConfig
    array: ArrayConfig
    grid: AngularGrid
    element: Any
    pattern: GainPattern
    codebook: BeamCodebook
    shadow: ShadowingParams


def build_scenario(config: ScenarioConfig) -> Scenario:
    """
    Instantiate array, grid, element pattern, gains and codebook.

    Raises:
        DimensionError: If the gain table or codebook file disagrees with the scenario.
    """
    section = config.array
    wavelength = SPEED_OF_LIGHT / section.frequency_hz
    array = ArrayConfig(
        n_x=section.n_x,
        n_y=section.n_y,
        d_x=section.spacing_x_wavelengths * wavelength,
        d_y=section.spacing_y_wavelengths * wavelength,
        wavelength=wavelength,
        sigma=section.sigma,
        power=section.power,
    )

    g = config.grid
    if g.tilt_angles is not None or g.azimuth_angles is not None:
        default = AngularGrid.from_ranges((g.tilt_start, g.tilt_stop, g.tilt_step), (g.azimuth_start, g.azimuth_stop, g.azimuth_step))
        grid = AngularGrid(tuple(g.tilt_angles or default.tilt_angles), tuple(g.azimuth_angles or default.azimuth_angles))
    else:
        grid = AngularGrid.from_ranges((g.tilt_start, g.tilt_stop, g.tilt_step), (g.azimuth_start, g.azimuth_stop, g.azimuth_step))

    gain = config.gain
    if gain.kind == "table":
        pattern, element = load_gain_table(config.resolve_path(gain.table_path), grid)
    else:
        if gain.kind == "parabolic":
            element = ParabolicElementPattern(gain.peak_gain_dbi, gain.tilt_beamwidth_deg, gain.azimuth_beamwidth_deg, gain.floor_db)
        else:
            element = IsotropicElementPattern(gain.uniform_value)
        pattern = sample_gain_pattern(element, grid)

    if config.codebook.kind == "file":
        codebook = load_codebook(config.resolve_path(config.codebook.path), array)
    else:
        codebook = make_dft_codebook(array, steer_grid(config.codebook.steer_tilts, config.codebook.steer_azimuths))

    return Scenario(config, array, grid, element, pattern, codebook, ShadowingParams(config.shadowing.log_std))


def value_distribution(config: ScenarioConfig) -> ValueDistribution:
    t = config.truth
    return ValueDistribution(t.distribution, t.dynamic_range_db, t.peak, t.low, t.high)


def build_coefficient_matrix(scenario: Scenario) -> CoefficientMatrix:
    return build_matrix(scenario.array, scenario.grid, scenario.pattern, scenario.codebook, n_jobs=scenario.config.simulation.n_jobs)


def synthetic_truths(scenario: Scenario, matrix: CoefficientMatrix, k: int, n_grids: int, consumer: int) -> List[GroundTruthAps]:
    """One K-sparse truth per synthetic grid over the matrix's non-zero columns."""
    candidates = np.flatnonzero(matrix.valid_columns)
    dist = value_distribution(scenario.config)
    return [
        generate_ground_truth(matrix.n_columns, k, stream(scenario.config.seed, consumer, g), dist, candidates=candidates)
        for g in range(n_grids)
    ]


def _sparse_by_label(matrix: CoefficientMatrix, x: np.ndarray) -> Dict[str, float]:
    labels = matrix.labels()
    return {labels[n]: float(x[n]) for n in np.flatnonzero(x > 0)}


def _write_json(payload: dict, path: Path) -> Path:
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
    return path


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(out_dir: Path, command: str, config: ScenarioConfig, artifacts: Sequence[Path]) -> Path:
    """manifest.json with the config hash, seed, command and artifact digests."""
    payload = {
        "command": command,
        "config_hash": config_hash(config),
        "seed": config.seed,
        "artifacts": {Path(p).name: file_sha256(p) for p in artifacts},
    }
    return _write_json(payload, out_dir / "manifest.json")


def cmd_build_matrix(scenario: Scenario, out_dir: Path) -> List[Path]:
    """matrix.csv, matrix.json and column_norms.csv."""
    matrix = build_coefficient_matrix(scenario)
    norms = pd.DataFrame({"column": np.arange(matrix.n_columns), "label": matrix.labels(), "norm": matrix.col_norms})
    norms_path = out_dir / "column_norms.csv"
    norms.to_csv(norms_path, index=False, float_format="%.17g")
    return [
        save_matrix_csv(matrix, out_dir / "matrix.csv"),
        save_matrix_json(matrix, out_dir / "matrix.json", config_hash(scenario.config)),
        norms_path,
    ]


def cmd_simulate(scenario: Scenario, out_dir: Path) -> List[Path]:
    """Per-grid RSRP traces plus simulation.json with truths, A x and empirical means."""
    config = scenario.config
    matrix = build_coefficient_matrix(scenario)
    truths = synthetic_truths(scenario, matrix, config.truth.k, config.truth.n_grids, STREAM_TRUTH)

    artifacts, grids = [], []
    for g, truth in enumerate(truths):
        samples = estimate_expected_rsrp(
            scenario.array, scenario.grid, scenario.pattern, scenario.codebook, truth, scenario.shadow,
            seed=config.seed, t_count=config.simulation.t_count, chunk_size=config.simulation.chunk_size,
            n_jobs=config.simulation.n_jobs, stream_key=(STREAM_SIMULATION, g),
        )
        artifacts.append(export_trace(samples, out_dir / f"trace_{g}.csv"))
        grids.append({
            "grid": g,
            "truth": _sparse_by_label(matrix, truth.x),
            "support": list(truth.support),
            "expected_rsrp": [float(v) for v in matrix.expected_rsrp(truth.x)],
            "empirical_mean": [float(v) for v in samples.mean],
            "std_error": [float(v) for v in samples.std_error],
        })
        logger.info(f"Simulated grid {g}: {truth.k} paths, {samples.t_count} samples per beam")

    payload = {"config_hash": config_hash(config), "seed": config.seed, "beams": list(scenario.codebook.labels), "grids": grids}
    artifacts.append(_write_json(payload, out_dir / "simulation.json"))
    return artifacts


def _solve_measurement(name: str, matrix: CoefficientMatrix, gm: GridMeasurement, config: ScenarioConfig) -> dict:
    rows = gm.present_rows()
    if not rows:
        raise DimensionError(f"grid {gm.grid_id} has no measured beams")
    a = select_rows(matrix, rows) if len(rows) < matrix.codebook_size else matrix
    result = solve(name, a, gm.y()[rows], config.solver)
    labels = matrix.labels()
    entry = {"grid_id": gm.grid_id, "cell_id": gm.cell_id, "beams": [matrix.beam_labels[m] for m in rows]}
    entry.update(result.to_dict(matrix.column_index))
    entry["support_labels"] = [labels[n] for n in result.support]
    return entry


def cmd_solve(scenario: Scenario, out_dir: Path, solver: Optional[str] = None, input_path: Optional[Path] = None) -> List[Path]:
    """Solve measured grids (``--input`` or measurements.path) or noiseless synthetic ones."""
    config = scenario.config
    name = solver or config.solver_name
    matrix = build_coefficient_matrix(scenario)
    source = input_path or config.resolve_path(config.measurements.path)

    results = []
    if source is not None:
        for gm in ingest_measurements(source, scenario.codebook.labels):
            results.append(_solve_measurement(name, matrix, gm, config))
    else:
        labels = matrix.labels()
        for g, truth in enumerate(synthetic_truths(scenario, matrix, config.truth.k, config.truth.n_grids, STREAM_TRUTH)):
            result = solve(name, matrix, matrix.expected_rsrp(truth.x), config.solver)
            entry = {"grid_id": f"grid-{g}", "truth_support": list(truth.support)}
            entry.update(result.to_dict())
            entry["support_labels"] = [labels[n] for n in result.support]
            entry["accuracy"] = support_accuracy(result.support, truth.support)
            results.append(entry)

    payload = {"config_hash": config_hash(config), "seed": config.seed, "solver": name, "results": results}
    logger.info(f"Solved {len(results)} grids with {name}")
    return [_write_json(payload, out_dir / "solve_results.json")]


def experiment_spec(config: ScenarioConfig, var: Optional[str] = None, values: Optional[Sequence[int]] = None, trials: Optional[int] = None) -> ExperimentSpec:
    e = config.experiment
    return ExperimentSpec(
        sweep_var=var or e.sweep_var,
        values=tuple(values or e.values),
        n=e.n,
        m=e.m,
        k=e.k,
        trials=trials or e.trials,
        solvers=tuple(e.solvers),
        seed=config.seed,
        value_dist=value_distribution(config),
        noise_std=e.noise_std,
        beam_subset=e.beam_subset,
        n_jobs=e.n_jobs,
    )


def cmd_sweep(
    scenario: Scenario,
    out_dir: Path,
    var: Optional[str] = None,
    values: Optional[Sequence[int]] = None,
    trials: Optional[int] = None,
    plot: bool = False,
) -> List[Path]:
    """sweep_<var>.csv and .json, plus sweep_<var>.png when plotting."""
    spec = experiment_spec(scenario.config, var, values, trials)
    report = run_accuracy_sweep(spec, build_coefficient_matrix(scenario), scenario.config.solver)
    stem = f"sweep_{spec.sweep_var}"
    artifacts = [report.save_csv(out_dir / f"{stem}.csv"), report.save_json(out_dir / f"{stem}.json", config_hash(scenario.config))]
    if plot:
        artifacts.append(plot_accuracy_curves(report, out_dir / f"{stem}.png"))
    return artifacts


def measured_rotation_cases(before: Sequence[GridMeasurement], after: Sequence[GridMeasurement], serving_cell: Optional[str]) -> List[RotationCase]:
    """Pair grids measured in both campaigns by (grid_id, cell_id)."""
    after_by_key = {(gm.grid_id, gm.cell_id): gm for gm in after}
    cases = []
    for gm in before:
        match = after_by_key.get((gm.grid_id, gm.cell_id))
        if match is None:
            logger.warning(f"Grid {gm.grid_id} / cell {gm.cell_id} has no post-rotation measurement")
            continue
        cell_class = "serving" if serving_cell is None or gm.cell_id == serving_cell else "neighborhood"
        cases.append(RotationCase(gm.grid_id, cell_class, gm.y(), match.y(), gm.mask, match.mask))
    return cases


def rotation_report(scenario: Scenario, solvers: Optional[Sequence[str]] = None) -> EvalReport:
    config = scenario.config
    rotation = config.rotation
    matrix = build_coefficient_matrix(scenario)
    rotated_scenario = rotate_scenario(
        scenario.array, scenario.grid, scenario.codebook, rotation.azimuth_offset_deg, rotation.tilt_offset_deg, scenario.element
    )
    rotated = build_rotated_matrix(rotated_scenario, scenario.grid, n_jobs=config.simulation.n_jobs)

    measured = config.resolve_path(config.measurements.path)
    if measured is not None:
        rotated_path = config.resolve_path(config.measurements.rotated_path)
        if rotated_path is None:
            raise ValueError("measurements.rotated_path is required for a measured rotation evaluation")
        labels = scenario.codebook.labels
        cases = measured_rotation_cases(ingest_measurements(measured, labels), ingest_measurements(rotated_path, labels), rotation.serving_cell)
    else:
        truths = synthetic_truths(scenario, matrix, rotation.k, rotation.n_grids, STREAM_ROTATION)
        cases = synthetic_rotation_cases(matrix, rotated, [t.x for t in truths])

    cfg = config.solver.model_copy(update={"k_max": max(config.solver.k_max, rotation.k)}) if measured is None else config.solver
    return run_rotation_protocol(matrix, rotated, cases, list(solvers or rotation.solvers), cfg)


def cmd_rotate_eval(scenario: Scenario, out_dir: Path, solver: Optional[str] = None) -> List[Path]:
    """rotation_mae.csv and rotation_mae.json."""
    report = rotation_report(scenario, [solver] if solver else None)
    return [
        report.save_csv(out_dir / "rotation_mae.csv"),
        report.save_json(out_dir / "rotation_mae.json", config_hash(scenario.config)),
    ]


def run_pipeline(
    command: str,
    config: ScenarioConfig,
    out_dir,
    solver: Optional[str] = None,
    var: Optional[str] = None,
    values: Optional[Sequence[int]] = None,
    trials: Optional[int] = None,
    plot: bool = False,
    input_path: Optional[Path] = None,
) -> List[Path]:
    """
    Run one command and write its artifacts and manifest.

    Returns:
        The artifact paths, manifest last.
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command '{command}', expected one of {', '.join(COMMANDS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"{command}: config hash {config_hash(config)}, seed {config.seed}")

    scenario = build_scenario(config)
    if command == "build-matrix":
        artifacts = cmd_build_matrix(scenario, out_dir)
    elif command == "simulate":
        artifacts = cmd_simulate(scenario, out_dir)
    elif command == "solve":
        artifacts = cmd_solve(scenario, out_dir, solver, input_path)
    elif command == "sweep":
        artifacts = cmd_sweep(scenario, out_dir, var, values, trials, plot)
    else:
        artifacts = cmd_rotate_eval(scenario, out_dir, solver)

    for path in artifacts:
        logger.info(f"Wrote {path}")
    return artifacts + [write_manifest(out_dir, command, config, artifacts)]
