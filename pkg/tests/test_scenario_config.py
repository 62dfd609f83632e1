"""
Tests for scenario config loading and hashing.
"""

import json
from pathlib import Path

import pytest

from src.config.scenario_config import (
    DEFAULT_MATRIX_CACHE_SIZE,
    DEFAULT_OUTPUT_DIR,
    config_hash,
    cors_origins,
    load_config,
    matrix_cache_size,
    output_dir,
    parse_config,
)
from src.errors import ConfigurationError


def test_empty_config_is_the_default_scenario():
    config = parse_config({})
    assert (config.array.n_x, config.array.n_y) == (8, 4)
    assert config.grid.tilt_step == 2.0 and config.grid.azimuth_step == 5.0
    assert len(config.codebook.steer_tilts) * len(config.codebook.steer_azimuths) == 32
    assert config.solver.k_max == 5
    assert config.solver_name == "wnomp"


def test_errors_name_the_failing_field():
    with pytest.raises(ConfigurationError) as excinfo:
        parse_config({"array": {"n_x": 0}, "solver": {"k_max": 0}})
    message = str(excinfo.value)
    assert "array.n_x" in message
    assert "solver.k_max" in message


def test_unknown_fields_are_rejected():
    with pytest.raises(ConfigurationError) as excinfo:
        parse_config({"array": {"n_z": 3}})
    assert "array.n_z" in str(excinfo.value)


def test_table_gain_requires_path():
    with pytest.raises(ConfigurationError):
        parse_config({"gain": {"kind": "table"}})


def test_hash_ignores_key_order_and_tracks_values():
    first = parse_config({"seed": 3, "array": {"n_x": 4, "n_y": 2}})
    second = parse_config({"array": {"n_y": 2, "n_x": 4}, "seed": 3})
    assert config_hash(first) == config_hash(second)
    assert len(config_hash(first)) == 64
    assert config_hash(parse_config({"seed": 4, "array": {"n_x": 4, "n_y": 2}})) != config_hash(first)


def test_relative_paths_resolve_against_config_file(tmp_path):
    path = tmp_path / "configs" / "scenario.json"
    path.parent.mkdir()
    path.write_text(json.dumps({"gain": {"kind": "table", "table_path": "gains.csv"}}))
    config = load_config(path)
    assert config.resolve_path(config.gain.table_path) == path.parent.resolve() / "gains.csv"
    assert config.resolve_path("/abs/file.csv") == Path("/abs/file.csv")
    assert config.resolve_path(None) is None


def test_load_config_rejects_bad_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "absent.json")

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_config(broken)

    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(ConfigurationError):
        load_config(listing)


def test_output_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.delenv("LSCM_OUTPUT_DIR", raising=False)
    assert output_dir() == Path(DEFAULT_OUTPUT_DIR)
    monkeypatch.setenv("LSCM_OUTPUT_DIR", str(tmp_path))
    assert output_dir() == tmp_path


def test_cors_origins_from_environment(monkeypatch):
    monkeypatch.delenv("LSCM_CORS_ORIGINS", raising=False)
    assert cors_origins() == []
    monkeypatch.setenv("LSCM_CORS_ORIGINS", "http://localhost:8080, https://planner.example.org,")
    assert cors_origins() == ["http://localhost:8080", "https://planner.example.org"]


def test_matrix_cache_size_from_environment(monkeypatch):
    monkeypatch.delenv("LSCM_MATRIX_CACHE_SIZE", raising=False)
    assert matrix_cache_size() == DEFAULT_MATRIX_CACHE_SIZE
    monkeypatch.setenv("LSCM_MATRIX_CACHE_SIZE", "2")
    assert matrix_cache_size() == 2
    for bad in ("lots", "-1"):
        monkeypatch.setenv("LSCM_MATRIX_CACHE_SIZE", bad)
        with pytest.raises(ConfigurationError):
            matrix_cache_size()
