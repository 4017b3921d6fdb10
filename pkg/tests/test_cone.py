import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sblcube.analysis.cone import cone_partition, sphere_candidates


def test_one_dimensional_partition():
    cp = cone_partition(1, 0.1)
    assert sorted(cp.gamma_set.ravel()) == [-1.0, 1.0]
    w = cp.weights([[3.0], [-0.2]])
    np.testing.assert_array_equal(np.sort(w, axis=1), [[0.0, 1.0], [0.0, 1.0]])


def test_circle_example():
    cp = cone_partition(2, 0.05)
    assert cp.min_separation() >= 0.05 / 6
    assert cp.covering_radius() <= 0.05 / 2
    xi = np.random.default_rng(0).normal(size=(5000, 2))
    np.testing.assert_allclose(cp.weights(xi).sum(axis=1), 1.0, atol=1e-12)


@settings(max_examples=8)
@given(st.integers(2, 3), st.floats(0.15, 0.6), st.integers(0, 1000))
def test_partition_invariants(dim, delta, seed):
    cp = cone_partition(dim, delta)
    assert np.allclose(np.linalg.norm(cp.gamma_set, axis=1), 1.0)
    assert cp.min_separation() >= delta / 6
    assert cp.covering_radius(2000, seed) <= delta / 2
    xi = np.random.default_rng(seed).normal(size=(500, dim)) * 10.0 ** np.random.default_rng(seed).uniform(-3, 3, (500, 1))
    w = cp.weights(xi)
    assert np.all(w >= 0)
    np.testing.assert_allclose(w.sum(axis=1), 1.0, atol=1e-12)


def test_bumps_profile():
    cp = cone_partition(2, 0.3)
    g = cp.gamma_set[0]
    rot = lambda a: np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]]) @ g
    # chord |w - g| = 2 sin(a/2)
    inside = rot(2 * np.arcsin(0.14 / 2))
    outside = rot(2 * np.arcsin(0.31 / 2))
    assert cp.bumps(inside)[0, 0] == 1.0
    assert cp.bumps(outside)[0, 0] == 0.0


def test_weights_are_homogeneous_of_degree_zero():
    cp = cone_partition(3, 0.4)
    xi = np.random.default_rng(5).normal(size=(50, 3))
    np.testing.assert_allclose(cp.weights(xi), cp.weights(1e4 * xi), atol=1e-13)


def test_bad_inputs():
    with pytest.raises(ValueError):
        cone_partition(0, 0.1)
    with pytest.raises(ValueError):
        cone_partition(2, 0.0)
    with pytest.raises(ValueError):
        cone_partition(2, 0.3).weights([[0.0, 0.0]])
    with pytest.raises(ValueError):
        sphere_candidates(6, 1e-3)
