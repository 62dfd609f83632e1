"""
End-to-end tests for the pipeline commands and the command-line entry point.
"""

import json

import numpy as np
import pandas as pd
import pytest

from main import build_parser, main
from src.config.scenario_config import config_hash, load_config
from src.evaluation.metrics import to_db
from src.pipeline import build_coefficient_matrix, build_scenario, file_sha256, run_pipeline


@pytest.fixture
def small_config(small_config_file):
    return load_config(small_config_file)


def _manifest(out_dir):
    return json.loads((out_dir / "manifest.json").read_text())


def test_build_matrix_artifacts(tmp_path, small_config):
    artifacts = run_pipeline("build-matrix", small_config, tmp_path)
    assert [p.name for p in artifacts] == ["matrix.csv", "matrix.json", "column_norms.csv", "manifest.json"]

    df = pd.read_csv(tmp_path / "matrix.csv")
    assert df.shape == (8, 101)
    assert len(pd.read_csv(tmp_path / "column_norms.csv")) == 100

    manifest = _manifest(tmp_path)
    assert manifest["command"] == "build-matrix"
    assert manifest["seed"] == 7
    assert manifest["config_hash"] == config_hash(small_config)
    assert manifest["artifacts"]["matrix.csv"] == file_sha256(tmp_path / "matrix.csv")


def test_simulate_writes_traces(tmp_path, small_config):
    run_pipeline("simulate", small_config, tmp_path)
    trace = pd.read_csv(tmp_path / "trace_1.csv")
    assert list(trace.columns) == ["t", "beam", "rsrp_linear", "rsrp_db"]
    assert len(trace) == 64 * 8

    payload = json.loads((tmp_path / "simulation.json").read_text())
    assert len(payload["grids"]) == 2
    assert len(payload["grids"][0]["support"]) == 1
    assert len(payload["grids"][0]["empirical_mean"]) == 8


def test_reruns_are_byte_identical(tmp_path, small_config):
    for command in ("build-matrix", "simulate", "sweep"):
        run_pipeline(command, small_config, tmp_path / f"{command}-a")
        run_pipeline(command, small_config, tmp_path / f"{command}-b")
        assert _manifest(tmp_path / f"{command}-a") == _manifest(tmp_path / f"{command}-b")


def test_seed_changes_simulation(tmp_path, small_config):
    run_pipeline("simulate", small_config, tmp_path / "a")
    run_pipeline("simulate", small_config.model_copy(update={"seed": 8}), tmp_path / "b")
    assert _manifest(tmp_path / "a")["artifacts"]["trace_0.csv"] != _manifest(tmp_path / "b")["artifacts"]["trace_0.csv"]


def test_solve_synthetic_grids(tmp_path, small_config):
    run_pipeline("solve", small_config, tmp_path, solver="nnomp")
    payload = json.loads((tmp_path / "solve_results.json").read_text())
    assert payload["solver"] == "nnomp"
    assert len(payload["results"]) == 2
    for entry in payload["results"]:
        assert len(entry["support"]) <= 1
        assert 0.0 <= entry["accuracy"] <= 1.0


def test_solve_measured_grids(tmp_path, small_config):
    scenario = build_scenario(small_config)
    matrix = build_coefficient_matrix(scenario)
    n = int(np.argmax(matrix.col_norms))
    rsrp_db = to_db(0.5 * matrix.a[:, n])
    rows = [f"g1,c1,{label},{value:.17g}" for label, value in zip(matrix.beam_labels, rsrp_db)]
    # second grid misses its first beam
    rows += [f"g2,c1,{label},{value:.17g}" for label, value in list(zip(matrix.beam_labels, rsrp_db))[1:]]
    measurements = tmp_path / "drive_test.csv"
    measurements.write_text("grid_id,cell_id,beam_id,rsrp_db\n" + "\n".join(rows) + "\n")

    run_pipeline("solve", small_config, tmp_path / "out", solver="wnomp", input_path=measurements)
    results = json.loads((tmp_path / "out" / "solve_results.json").read_text())["results"]
    assert [entry["grid_id"] for entry in results] == ["g1", "g2"]
    assert results[0]["support_cells"] == [n]
    assert results[0]["x_hat"][str(n)] == pytest.approx(0.5, rel=1e-9)
    assert results[1]["beams"] == list(matrix.beam_labels[1:])


def test_sweep_report(tmp_path, small_config):
    run_pipeline("sweep", small_config, tmp_path, values=[4, 6, 8], trials=2, plot=True)
    df = pd.read_csv(tmp_path / "sweep_M.csv")
    assert df.groupby("solver").size().to_dict() == {"lasso": 3, "nnomp": 3, "wnomp": 3}
    assert (tmp_path / "sweep_M.png").stat().st_size > 0
    assert "sweep_M.png" in _manifest(tmp_path)["artifacts"]


def test_rotate_eval_report(tmp_path, small_config):
    run_pipeline("rotate-eval", small_config, tmp_path)
    df = pd.read_csv(tmp_path / "rotation_mae.csv")
    assert df[["cellclass", "solver"]].values.tolist() == [
        ["serving", "nnomp"], ["serving", "wnomp"], ["all", "nnomp"], ["all", "wnomp"],
    ]
    assert (df["mae_db"] >= 0).all()
    assert (df["n_grids"] == 2).all()


def test_rotate_eval_with_measurements(tmp_path, small_config_data):
    config_path = tmp_path / "scenario.json"
    data = dict(small_config_data, measurements={"path": "before.csv", "rotated_path": "after.csv"})
    data["rotation"] = dict(data["rotation"], serving_cell="c1")
    config_path.write_text(json.dumps(data))
    config = load_config(config_path)
    labels = build_scenario(config).codebook.labels

    header = "grid_id,cell_id,beam_id,rsrp_db\n"
    before = "".join(f"{g},{c},{b},-{60 + m}\n" for g in ("g1", "g2") for c in ("c1", "c2") for m, b in enumerate(labels))
    after = "".join(f"{g},{c},{b},-{61 + m}\n" for g in ("g1", "g2") for c in ("c1", "c2") for m, b in enumerate(labels))
    (tmp_path / "before.csv").write_text(header + before)
    (tmp_path / "after.csv").write_text(header + after)

    run_pipeline("rotate-eval", config, tmp_path / "out", solver="wnomp")
    df = pd.read_csv(tmp_path / "out" / "rotation_mae.csv")
    assert df["cellclass"].tolist() == ["serving", "neighborhood", "all"]
    assert df["n_grids"].tolist() == [2, 2, 4]


def test_unknown_command(tmp_path, small_config):
    with pytest.raises(ValueError):
        run_pipeline("train", small_config, tmp_path)


def test_main_runs_command(tmp_path, small_config_file):
    out = tmp_path / "out"
    status = main(["sweep", "--config", str(small_config_file), "--out", str(out), "--values", "4,8", "--trials", "2", "--seed", "3"])
    assert status == 0
    assert len(pd.read_csv(out / "sweep_M.csv")) == 6
    assert _manifest(out)["seed"] == 3


def test_main_exit_codes(tmp_path, small_config_file):
    assert main([]) == 2
    assert main(["build-matrix", "--config", str(tmp_path / "absent.json"), "--out", str(tmp_path)]) == 1
    assert main(["build-matrix", "--config", str(small_config_file), "--out", str(tmp_path), "--seed", "-1"]) == 1

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"array": {"n_x": 0}}))
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 1


def test_values_argument_parsing():
    args = build_parser().parse_args(["sweep", "--values", "8,16,24,32"])
    assert args.values == [8, 16, 24, 32]
    with pytest.raises(SystemExit):
        build_parser().parse_args(["sweep", "--values", "8,x"])
