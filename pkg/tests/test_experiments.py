import numpy as np
import pytest

from sblcube.cube import CubicalData, FunctionAssignment
from sblcube.evaluator import blowup_cubical, blowup_experiment, sweep_truncation
from sblcube.feasibility import PreconditionError
from sblcube.gaussian import GaussianMixture
from sblcube.linalg import RationalMatrix

R = RationalMatrix.parse
R_LIST = [2, 4, 8, 16, 32, 64]


def test_sweep_monotone_to_dirac_limit():
    tup = FunctionAssignment.uniform(2, GaussianMixture.standard(2).normalized(4))
    res = sweep_truncation(R("-1 0; 0 -1"), tup, [2.0**k for k in range(0, 13)])
    ratios = [r[2] for r in res.rows]
    assert ratios[0] == pytest.approx(0.0, abs=1e-15)
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))
    assert res.sup_ratio <= res.dirac_ratio + 1e-12
    assert res.dirac_ratio == pytest.approx(1.0, abs=1e-12)
    assert all(abs(x) <= 1e-3 for x in res.differences[8:])
    assert res.feasible and res.note == ""


def test_infeasible_sweep_is_finite_and_flagged():
    tup = FunctionAssignment.uniform(2, GaussianMixture.standard(2))
    res = sweep_truncation(R("0 0; 0 0"), tup, [2.0**k for k in range(1, 12)])
    assert not res.feasible and "witness" in res.note
    assert all(np.isfinite(r[2]) for r in res.rows)
    assert abs(res.differences[-1]) < 1e-4


def test_blowup_simple_projection():
    res = blowup_experiment(R("1 0"), [R("1 0"), R("0 1")], [2, 2], [(0, 1)], R_LIST)
    assert res.predicted_gap == pytest.approx(0.5)
    assert abs(res.slope - 0.5) <= 0.2


def test_blowup_cubical_zero_matrix():
    res = blowup_cubical(CubicalData(2, 1, R("0 0; 0 0")), R_LIST)
    assert res.predicted_gap == 1
    assert abs(res.slope - 1.0) <= 0.2
    assert set(res.to_dict()) == {"slope", "intercept", "predicted_gap", "points"}


def test_blowup_refused_when_feasible():
    with pytest.raises(PreconditionError):
        blowup_cubical(CubicalData(2, 1, R("-1 0; 0 -1")), R_LIST)
