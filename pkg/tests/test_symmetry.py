import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sblcube.analysis.kernels import Dirac, HeatDifference
from sblcube.cube import CubicalData, FunctionAssignment, corners
from sblcube.evaluator import apply_symmetry, permutation_matrix
from sblcube.feasibility import PreconditionError
from sblcube.gaussian import GaussianMixture
from sblcube.linalg import RationalMatrix

R = RationalMatrix.parse


def _tuple(m, seed):
    rng = np.random.default_rng(seed)
    return FunctionAssignment({j: GaussianMixture.random(m, rng, 2) for j in corners(m)})


def test_identity_scaling_is_exact():
    data = CubicalData(2, 1, R("-1 1/2; 1/3 -1"))
    res = apply_symmetry("scale", data, _tuple(2, 0), HeatDifference(4.0), D=R("1 0; 0 1"))
    assert res.before.value == res.after.value


def test_scaling_example():
    data = CubicalData(2, 1, R("-1 1/2; 1/3 -1"))
    res = apply_symmetry("scale", data, _tuple(2, 1), HeatDifference(4.0), D=R("2 0; 0 1"))
    assert res.rel_error <= 1e-9
    assert res.data.A == R("-1 1/4; 2/3 -1")


def test_swap_example():
    data = CubicalData(2, 1, R("-1 1/2; 1/3 -1"))
    res = apply_symmetry("permute", data, _tuple(2, 2), HeatDifference(4.0), perm=[1, 0])
    assert res.rel_error <= 1e-9
    assert res.data.A == R("-1 1/3; 1/2 -1")


def test_permutation_matrix_convention():
    P = permutation_matrix([2, 0, 1]).to_numpy()
    y = np.array([10.0, 20.0, 30.0])
    np.testing.assert_array_equal(P @ y, [30.0, 10.0, 20.0])


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.sampled_from(["scale", "permute"]), st.sampled_from(["dirac", "heat"]))
def test_invariance(seed, kind, kname):
    rng = np.random.default_rng(seed)
    m, d = int(rng.integers(1, 4)), int(rng.integers(1, 3))
    A = R("; ".join(" ".join(f"{x}/3" for x in row) for row in rng.integers(-3, 4, (m, m))))
    data = CubicalData(m, d, A)
    rng2 = np.random.default_rng(seed + 1)
    tup = FunctionAssignment({j: GaussianMixture.random(m * d, rng2, 1) for j in corners(m)})
    K = Dirac() if kname == "dirac" else HeatDifference(float(rng.uniform(1, 8)))
    if kind == "scale":
        vals = [int(v) * (1 if rng.random() < 0.5 else -1) for v in rng.integers(1, 4, m)]
        D = R("; ".join(" ".join(str(vals[i]) if i == c else "0" for c in range(m)) for i in range(m)))
        res = apply_symmetry("scale", data, tup, K, D=D)
    else:
        res = apply_symmetry("permute", data, tup, K, perm=list(rng.permutation(m)))
    try:
        assert res.rel_error <= 1e-9
    except AssertionError:
        # a form that is itself ~0 only agrees absolutely
        assert abs(res.before.value - res.after.value) <= 1e-12


def test_preconditions():
    data = CubicalData(2, 1, R("-1 0; 0 -1"))
    with pytest.raises(PreconditionError):
        apply_symmetry("scale", data, _tuple(2, 0), Dirac(), D=R("1 0; 0 0"))
    with pytest.raises(PreconditionError):
        apply_symmetry("scale", data, _tuple(2, 0), Dirac(), D=R("1 1; 0 1"))
    with pytest.raises(PreconditionError):
        apply_symmetry("permute", data, _tuple(2, 0), Dirac(), perm=[0, 0])
    bad = CubicalData(2, 1, R("-1 0; 0 -1"), exponents={"00": 2})
    with pytest.raises(PreconditionError):
        apply_symmetry("scale", bad, _tuple(2, 0), Dirac(), D=R("1 0; 0 1"))
