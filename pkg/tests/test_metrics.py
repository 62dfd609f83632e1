"""
Tests for unit conversions and evaluation metrics.
"""

import numpy as np
import pytest

from src.errors import DimensionError
from src.evaluation.metrics import DB_FLOOR, mae_db, support_accuracy, to_db, to_linear


def test_db_conversions():
    np.testing.assert_allclose(to_db([1.0, 10.0, 1e-6]), [0.0, 10.0, -60.0])
    np.testing.assert_allclose(to_linear([-60.0, 0.0]), [1e-6, 1.0])
    assert to_db(0.0) == DB_FLOOR
    with pytest.raises(ValueError):
        to_db([-1.0])


def test_db_round_trip():
    values = np.linspace(-200.0, 0.0, 401)
    np.testing.assert_allclose(to_db(to_linear(values)), values, atol=1e-12)


def test_support_accuracy():
    assert support_accuracy([1, 2, 3], [2, 3, 4, 5]) == 0.5
    assert support_accuracy([], [7]) == 0.0
    assert support_accuracy([9, 7], [7]) == 1.0
    with pytest.raises(ValueError):
        support_accuracy([1], [])


def test_mae_db():
    assert mae_db([-60.0, -70.0], [-61.0, -68.0]) == pytest.approx(1.5)
    assert mae_db([-80.0], [-80.0]) == 0.0
    with pytest.raises(DimensionError):
        mae_db([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        mae_db([], [])
