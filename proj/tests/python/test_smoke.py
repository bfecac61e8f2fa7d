import numpy as np
import pytest

import cass


def _pair_matrix():
    X = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    return X / np.linalg.norm(X, axis=0)


def test_nuclear_norm_and_svt():
    M = np.diag([3.0, 1.0, 0.5])
    assert cass.nuclear_norm(M) == pytest.approx(4.5)
    np.testing.assert_allclose(cass.svt(M, 1.0), np.diag([2.0, 0.0, 0.0]), atol=1e-12)


def test_trace_lasso_norm_between_l2_and_l1():
    X = _pair_matrix()
    w = np.array([0.3, -0.7, 0.2])
    omega = cass.trace_lasso_norm(X, w)
    assert np.linalg.norm(w) - 1e-12 <= omega <= np.abs(w).sum() + 1e-12


def test_solve_noisy_converges():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((10, 6))
    X /= np.linalg.norm(X, axis=0)
    y = X @ np.array([1.0, 0.0, 0.5, 0.0, 0.0, 0.0])
    r = cass.solve_noisy(X, y, 0.1)
    assert r.converged
    assert r.w.shape == (6,)
    assert np.isfinite(r.objective)


def test_baselines_shapes():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((8, 12))
    y = rng.standard_normal(8)
    assert cass.solve_lsr(X, y, 0.5).shape == (12,)
    w, ok = cass.solve_ssc(X, y, 0.3)
    assert ok and w.shape == (12,)
    W, E, ok = cass.solve_lrr(X, 0.3)
    assert ok and W.shape == (12, 12) and E.shape == (8, 12)


def test_segment_clean_subspaces():
    d = cass.gen_synthetic(k=3, dim=3, ambient=20, per=15, sigma=0.0, seed=4)
    X = np.asarray(d.X)
    assert X.shape == (20, 45)
    config = cass.SegmentationConfig(method="lsr", k=3, lambda_=0.1, seed=0)
    labels = cass.segment(X, config)
    assert cass.accuracy(labels, list(d.labels)) == pytest.approx(1.0)


def test_error_stats_and_exceptions():
    s = cass.error_stats([0.0, 0.2, 0.4])
    assert s.max == pytest.approx(0.4)
    assert s.mean == pytest.approx(0.2)
    assert s.std == pytest.approx(0.2)
    with pytest.raises(OSError):
        cass.load_csv("/nonexistent/file.csv")
    with pytest.raises(ValueError):
        cass.SegmentationConfig(method="bogus")
