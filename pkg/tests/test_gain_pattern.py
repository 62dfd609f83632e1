"""
Tests for element gain patterns and gain tables.
"""

import numpy as np
import pandas as pd
import pytest

from src.array.gain_pattern import (
    GainPattern,
    IsotropicElementPattern,
    ParabolicElementPattern,
    TabulatedElementPattern,
    element_gain,
    load_gain_table,
    sample_gain_pattern,
)
from src.array.geometry import AngularGrid
from src.errors import DimensionError


@pytest.fixture
def grid():
    return AngularGrid((-10.0, 0.0, 10.0), (-20.0, 0.0, 20.0, 40.0, 60.0, 80.0, 100.0, 120.0))


def _write_table(path, grid, gains):
    tilts, azimuths = np.meshgrid(grid.tilt_angles, grid.azimuth_angles, indexing="ij")
    pd.DataFrame({
        "tilt_deg": tilts.ravel(),
        "azimuth_deg": azimuths.ravel(),
        "gain_linear": np.asarray(gains).ravel(),
    }).to_csv(path, index=False)


def test_uniform_pattern_lookup(grid):
    pattern = GainPattern.uniform(grid, 1.0)
    assert element_gain(pattern, 2, 5) == 1.0
    with pytest.raises(IndexError):
        element_gain(pattern, 3, 0)


def test_gain_pattern_rejects_negative_entries():
    with pytest.raises(ValueError):
        GainPattern(np.array([[1.0, -0.5]]))


def test_parabolic_pattern_peaks_at_boresight():
    element = ParabolicElementPattern()
    assert element.gain_db(0.0, 0.0) == pytest.approx(8.0)
    assert element.amplitude(0.0, 0.0) == pytest.approx(10 ** (8.0 / 20.0))
    # 12 dB down one beamwidth off boresight
    assert element.gain_db(65.0, 0.0) == pytest.approx(8.0 - 12.0)
    assert element.gain_db(90.0, 170.0) == pytest.approx(8.0 - 30.0)


def test_sample_gain_pattern_matches_element(grid):
    element = ParabolicElementPattern()
    pattern = sample_gain_pattern(element, grid)
    assert pattern.gains.shape == (3, 8)
    assert element_gain(pattern, 1, 1) == pytest.approx(element.amplitude(0.0, 0.0))
    assert np.argmax(pattern.flat()) == grid.flat_index(1, 1)


def test_isotropic_pattern_is_constant(grid):
    pattern = sample_gain_pattern(IsotropicElementPattern(2.0), grid)
    assert np.all(pattern.gains == 2.0)


def test_load_gain_table_lookup(tmp_path, grid):
    gains = np.ones((3, 8))
    gains[2, 7] = 2.5
    path = tmp_path / "gains.csv"
    _write_table(path, grid, gains)

    pattern, element = load_gain_table(path, grid)
    assert element_gain(pattern, 2, 7) == 2.5
    assert element.coverage == ((-10.0, 10.0), (-20.0, 120.0))
    assert element.amplitude(10.0, 110.0) == pytest.approx(1.75)


def test_load_gain_table_requires_full_coverage(tmp_path, grid):
    path = tmp_path / "gains.csv"
    _write_table(path, grid, np.ones((3, 8)))
    df = pd.read_csv(path).iloc[1:]
    df.to_csv(path, index=False)
    with pytest.raises(DimensionError):
        load_gain_table(path, grid)


def test_load_gain_table_rejects_negative_gains(tmp_path, grid):
    gains = np.ones((3, 8))
    gains[0, 0] = -1.0
    path = tmp_path / "gains.csv"
    _write_table(path, grid, gains)
    with pytest.raises(ValueError):
        load_gain_table(path, grid)


def test_load_gain_table_missing_file(tmp_path, grid):
    with pytest.raises(FileNotFoundError):
        load_gain_table(tmp_path / "absent.csv", grid)


def test_tabulated_pattern_outside_table_raises():
    element = TabulatedElementPattern([0.0, 10.0], [0.0, 10.0], np.ones((2, 2)))
    with pytest.raises(ValueError):
        element.amplitude(20.0, 0.0)
