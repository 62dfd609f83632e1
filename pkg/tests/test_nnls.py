"""
Tests for the restricted NNLS subproblem.
"""

import numpy as np
import pytest

import src.optimization.nnls as nnls_module
from src.errors import DimensionError, NNLSConvergenceError
from src.optimization.nnls import kkt_residual, nnls


def _projected_gradient(a, y, iterations=1_000_000, tol=1e-13):
    """Independent NNLS oracle: projected gradient with step 1/L."""
    step = 1.0 / np.linalg.norm(a, 2) ** 2
    z = np.zeros(a.shape[1])
    for _ in range(iterations):
        z_next = np.maximum(z - step * a.T @ (a @ z - y), 0.0)
        if np.max(np.abs(z_next - z)) < tol:
            return z_next
        z = z_next
    return z


def test_identity_clamps_negative_entries():
    z = nnls(np.eye(2), np.array([1.0, -2.0]))
    np.testing.assert_allclose(z, [1.0, 0.0])


def test_single_column_recovers_scale():
    a = np.array([[1.0], [2.0], [0.5]])
    z = nnls(a, 2.5 * a[:, 0])
    assert z[0] == pytest.approx(2.5)


def test_matches_projected_gradient_oracle():
    rng = np.random.default_rng(6)
    for _ in range(50):
        n_cols = int(rng.integers(1, 7))
        n_rows = int(rng.integers(n_cols + 2, 11))
        a = rng.normal(size=(n_rows, n_cols)) + 2.0 * np.eye(n_rows, n_cols)
        y = rng.normal(size=n_rows)
        z = nnls(a, y)
        assert np.linalg.norm(z - _projected_gradient(a, y)) < 1e-7
        assert kkt_residual(a, y, z) < 1e-8


def test_solution_satisfies_optimality_conditions():
    rng = np.random.default_rng(9)
    a = np.abs(rng.normal(size=(8, 4)))
    y = rng.normal(size=8)
    z = nnls(a, y)
    assert np.all(z >= 0.0)
    assert kkt_residual(a, y, z) < 1e-9


def test_kkt_residual_flags_suboptimal_points():
    assert kkt_residual(np.eye(2), np.array([1.0, 1.0]), np.array([0.0, 0.0])) == pytest.approx(1.0)


def test_shape_errors():
    with pytest.raises(DimensionError):
        nnls(np.zeros((3, 0)), np.zeros(3))
    with pytest.raises(DimensionError):
        nnls(np.eye(3), np.zeros(2))


def test_iteration_cap_raises_with_diagnostics(monkeypatch):
    def failing(a, y, maxiter=None):
        raise RuntimeError("Maximum number of iterations reached.")

    monkeypatch.setattr(nnls_module, "_scipy_nnls", failing)
    with pytest.raises(NNLSConvergenceError) as excinfo:
        nnls(np.eye(3), np.ones(3), max_iter=2)
    assert excinfo.value.n_rows == 3
    assert excinfo.value.n_cols == 3
    assert excinfo.value.max_iter == 2
