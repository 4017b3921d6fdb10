"""The compiled kernels and the pure-Python fallback must agree exactly."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sblcube import _backend, _kernels_py as pure

compiled = _backend.compiled
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")

int_rows = st.integers(1, 5).flatmap(lambda r: st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)))


def test_backend_label():
    assert _backend.BACKEND in ("compiled", "python")


@given(int_rows)
def test_pure_echelon_rank_matches_numpy(rows):
    rank, pivots, E, _ = pure.bareiss_echelon(rows)
    assert rank == np.linalg.matrix_rank(np.array(rows, dtype=float))
    assert pivots == sorted(pivots)


@needs_compiled
@given(int_rows)
def test_echelon_backends_agree(rows):
    assert compiled.bareiss_echelon(rows) == pure.bareiss_echelon(rows)


@needs_compiled
@given(st.integers(1, 5).flatmap(lambda n: st.lists(
    st.lists(st.integers(-50, 50), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_backends_agree(rows):
    assert compiled.bareiss_det(rows) == pure.bareiss_det(rows)


@needs_compiled
def test_compiled_det_overflow_raises():
    big = 2**62
    with pytest.raises(OverflowError):
        compiled.bareiss_det([[big, 3], [5, big]])
    assert _backend.bareiss_det([[big, 3], [5, big]]) == big * big - 15


@needs_compiled
def test_packing_backends_agree():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(800, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    a = np.asarray(compiled.greedy_separated(pts, 0.2))
    b = np.asarray(pure.greedy_separated(pts, 0.2))
    assert np.array_equal(a, b)
    centers = pts[a]
    q = rng.normal(size=(500, 3))
    np.testing.assert_allclose(compiled.nearest_distance(q, centers), pure.nearest_distance(q, centers),
                               rtol=0, atol=1e-12)


def test_greedy_separated_is_separated_and_maximal():
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, size=(400, 2))
    keep = np.asarray(_backend.greedy_separated(pts, 0.3))
    chosen = pts[keep]
    d = np.linalg.norm(chosen[:, None] - chosen[None], axis=2)
    assert d[np.triu_indices(len(chosen), 1)].min() >= 0.3
    # every candidate is within 0.3 of a chosen point
    assert _backend.nearest_distance(pts, chosen).max() < 0.3


def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path
    path = Path(__file__).parent.parent / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--repeat", "1"])
    out = capsys.readouterr().out
    assert "greedy_separated" in out and "bareiss_det" in out
