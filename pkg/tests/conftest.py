"""
LSCM Toolkit - Test Configuration

Shared fixtures: small arrays, grids, codebooks, matrices and config files.
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root directory to the Python path
# This allows imports from the src directory to work correctly in tests
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.array.codebook import make_dft_codebook, steer_grid  # noqa: E402
from src.array.gain_pattern import GainPattern  # noqa: E402
from src.array.geometry import AngularGrid, ArrayConfig  # noqa: E402
from src.modeling.coefficient_matrix import build_matrix  # noqa: E402

WAVELENGTH = 1.0


@pytest.fixture
def small_array():
    """4x2 half-wavelength array with sigma 0.3."""
    return ArrayConfig(n_x=4, n_y=2, d_x=0.5, d_y=0.5, wavelength=WAVELENGTH, sigma=0.3, power=1.0)


@pytest.fixture
def small_grid():
    """10 x 10 grid, N = 100."""
    return AngularGrid.from_ranges((-18.0, 18.0, 4.0), (-45.0, 45.0, 10.0))


@pytest.fixture
def small_codebook(small_array):
    """Eight beams: tilts {-6, 6} x azimuths {-45, -15, 15, 45}."""
    return make_dft_codebook(small_array, steer_grid([-6.0, 6.0], [-45.0, -15.0, 15.0, 45.0]))


@pytest.fixture
def uniform_pattern(small_grid):
    return GainPattern.uniform(small_grid, 1.0)


@pytest.fixture
def small_matrix(small_array, small_grid, uniform_pattern, small_codebook):
    return build_matrix(small_array, small_grid, uniform_pattern, small_codebook)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_config_data():
    """Scenario config for a fast end-to-end run (4x2 array, 8 beams, 100 cells)."""
    return {
        "array": {"n_x": 4, "n_y": 2, "sigma": 0.3},
        "grid": {
            "tilt_start": -18, "tilt_stop": 18, "tilt_step": 4,
            "azimuth_start": -45, "azimuth_stop": 45, "azimuth_step": 10,
        },
        "codebook": {"steer_tilts": [-6, 6], "steer_azimuths": [-45, -15, 15, 45]},
        "truth": {"k": 1, "n_grids": 2},
        "simulation": {"t_count": 64, "chunk_size": 16},
        "solver": {"k_max": 1, "lasso_max_iter": 500},
        "experiment": {"sweep_var": "M", "values": [4, 8], "n": 40, "m": 8, "k": 1, "trials": 3},
        "rotation": {"azimuth_offset_deg": 10, "n_grids": 2, "k": 1, "solvers": ["nnomp", "wnomp"]},
        "seed": 7,
    }


@pytest.fixture
def small_config_file(tmp_path, small_config_data):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(small_config_data))
    return path
