"""
Tests for beam codebooks and their CSV files.
"""

import numpy as np
import pandas as pd
import pytest

from src.array.codebook import BeamCodebook, load_codebook, make_dft_codebook, save_codebook, steer_grid
from src.array.geometry import ArrayConfig
from src.errors import DimensionError


def test_boresight_beam_has_zero_phases():
    cfg = ArrayConfig(n_x=4, n_y=2)
    codebook = make_dft_codebook(cfg, [(0.0, 0.0)])
    assert codebook.size == 1
    assert np.all(codebook.phases == 0.0)


def test_fig2_style_codebook_has_five_beams():
    cfg = ArrayConfig()
    directions = [(0.0, -15.0), (0.0, 0.0), (0.0, 15.0), (0.0, 30.0), (0.0, 45.0)]
    codebook = make_dft_codebook(cfg, directions, labels=["a", "b", "c", "d", "e"])
    assert codebook.phases.shape == (5, 8, 4)
    assert codebook.row_of("d") == 3
    np.testing.assert_allclose(np.abs(codebook.precoders()), 1.0)


def test_default_labels_and_subset(small_codebook):
    assert small_codebook.labels[0] == "beam-0"
    sub = small_codebook.subset([5, 2])
    assert sub.labels == ("beam-5", "beam-2")
    np.testing.assert_array_equal(sub.phases[0], small_codebook.phases[5])


def test_labels_must_be_unique():
    with pytest.raises(ValueError):
        BeamCodebook(np.zeros((2, 1, 1)), ("x", "x"))


def test_check_array_detects_mismatch(small_codebook):
    with pytest.raises(DimensionError):
        small_codebook.check_array(ArrayConfig(n_x=8, n_y=4))


def test_steer_grid_varies_azimuth_fastest():
    assert steer_grid([1, 2], [10, 20]) == [(1.0, 10.0), (1.0, 20.0), (2.0, 10.0), (2.0, 20.0)]


def test_codebook_file_accepts_any_row_order(tmp_path, small_array, small_codebook):
    path = save_codebook(small_codebook, tmp_path / "codebook.csv")
    df = pd.read_csv(path)
    df.sample(frac=1.0, random_state=3).to_csv(path, index=False)

    loaded = load_codebook(path, small_array)
    assert set(loaded.labels) == set(small_codebook.labels)
    for label in small_codebook.labels:
        np.testing.assert_array_equal(loaded.phases[loaded.row_of(label)], small_codebook.phases[small_codebook.row_of(label)])


def test_codebook_file_missing_element(tmp_path, small_array, small_codebook):
    path = save_codebook(small_codebook, tmp_path / "codebook.csv")
    pd.read_csv(path).iloc[:-1].to_csv(path, index=False)
    with pytest.raises(DimensionError):
        load_codebook(path, small_array)


def test_codebook_file_index_out_of_range(tmp_path, small_codebook):
    path = save_codebook(small_codebook, tmp_path / "codebook.csv")
    with pytest.raises(DimensionError):
        load_codebook(path, ArrayConfig(n_x=2, n_y=2))
