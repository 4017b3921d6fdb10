"""Truncation sweeps, blow-up experiments and the pointwise AM-GM bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..analysis.kernels import HeatDifference
from ..cube import CubicalData, FunctionAssignment, corner_block, corners
from ..feasibility import (PreconditionError, bcct_gap, bcct_witness, check_conditions,
                           cubical_projections)
from ..gaussian import lp_norm
from ..linalg import RationalMatrix, det, kernel_basis
from .forms import eval_delta_form, eval_form, eval_subspace_form, tuple_dims


def norm_product(tup: FunctionAssignment, p: int) -> float:
    return math.prod(lp_norm(F, p) for _, F in tup.items())


@dataclass
class SweepResult:
    rows: list  # (T, FormResult, ratio)
    dirac_value: float
    dirac_ratio: float
    feasible: bool
    note: str = ""

    @property
    def sup_ratio(self) -> float:
        return max(r[2] for r in self.rows)

    @property
    def differences(self) -> list:
        return [b[2] - a[2] for a, b in zip(self.rows, self.rows[1:])]

    def to_rows(self) -> list:
        return [(T, res.value, res.std_error, ratio) for T, res, ratio in self.rows]


def sweep_truncation(A: RationalMatrix, tup: FunctionAssignment, T_list) -> SweepResult:
    """``Lambda(HeatDifference{T}, A)`` and its ratio to ``prod ||F_j||_{2^m}``."""
    m, d = tuple_dims(A, tup)
    denom = norm_product(tup, 2**m)
    if denom == 0:
        raise ZeroDivisionError("tuple has a zero function")
    rows = []
    for T in T_list:
        res = eval_form(HeatDifference(float(T)), A, tup)
        rows.append((float(T), res, res.value / denom))
    dirac = eval_delta_form(A, tup).value
    feasible = check_conditions(CubicalData(m, d, A)).feasible
    note = "" if feasible else (
        "A is infeasible: this fixed tuple stays bounded as T grows; unboundedness "
        "appears only over rescaled witness tuples (see blowup)")
    return SweepResult(rows, dirac, dirac / denom, feasible, note)


@dataclass
class BlowupResult:
    slope: float
    intercept: float
    predicted_gap: Fraction
    points: list = field(default_factory=list)  # (R, value, ratio)

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "predicted_gap": str(self.predicted_gap),
                "points": [{"R": R, "value": v, "ratio": r} for R, v, r in self.points]}


def blowup_experiment(Pi: RationalMatrix, projections, exponents, V_basis, R_list) -> BlowupResult:
    """Witness ratios ``Lambda / prod ||F_i||_{p_i}`` against ``R`` on a log-log fit.

    Needs even integer exponents (exact norms). Refused when the gap is ``<= 0``.
    """
    projections = list(projections)
    keys = list(range(len(projections)))
    gap = bcct_gap(Pi, V_basis, projections, exponents)
    if gap <= 0:
        raise PreconditionError(f"experiment refused: BCCT gap is {gap}, nothing to blow up")
    pts = []
    for R in R_list:
        W = bcct_witness(Pi, V_basis, float(R), projections)
        funcs = [W[k] for k in keys]
        val = eval_subspace_form(projections, funcs, V_basis).value
        denom = math.prod(lp_norm(F, int(p)) for F, p in zip(funcs, exponents))
        pts.append((float(R), val, val / denom))
    x = np.log([p[0] for p in pts])
    y = np.log([p[2] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return BlowupResult(float(slope), float(intercept), gap, pts)


def blowup_cubical(data: CubicalData, R_list, V_basis=None) -> BlowupResult:
    """Blow-up experiment for cubical data; ``V`` defaults to ``ker Pi``."""
    V = kernel_basis(data.Pi) if V_basis is None else V_basis
    projs = cubical_projections(data)
    keys = sorted(projs)
    return blowup_experiment(data.Pi, [projs[j] for j in keys], [data.exponents[j] for j in keys], V, R_list)


def am_gm_bound(A: RationalMatrix, d: int = 1) -> float:
    """``max_j |det((I A) Pi_j^T)|^{-d}`` (infinite if some corner is singular)."""
    I = RationalMatrix.identity(A.rows)
    worst = 0.0
    for j in corners(A.rows):
        dj = det(corner_block(I, A, j))
        if dj == 0:
            return math.inf
        worst = max(worst, abs(float(dj)) ** (-d))
    return worst
