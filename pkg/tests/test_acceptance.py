"""Acceptance criteria, one test per criterion, each reporting a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (lines appear in the summary) or
``python3 tests/test_acceptance.py`` (lines go to stdout).
"""

import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES, random_rational_matrix  # noqa: E402

from sblcube.analysis import (cone_partition, gaussian_identity_check, stick_search,  # noqa: E402
                              telescoping_closed_form, telescoping_integral, verify_stick)
from sblcube.analysis.kernels import Dirac, HeatDifference  # noqa: E402
from sblcube.cube import CubicalData, FunctionAssignment, corners  # noqa: E402
from sblcube.evaluator import (am_gm_bound, apply_symmetry, blowup_cubical,  # noqa: E402
                               blowup_experiment, eval_delta_form, eval_form, sweep_truncation)
from sblcube.feasibility import (EquivalenceViolation, TrilinearCase, check_conditions,  # noqa: E402
                                 classify_trilinear, satisfies_epsilon_hypothesis)
from sblcube.gaussian import GaussianMixture  # noqa: E402
from sblcube.linalg import RationalMatrix, hs_norm_sq, inverse  # noqa: E402

R = RationalMatrix.parse
R_LIST = [2, 4, 8, 16, 32, 64]


def report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _degenerate_instances():
    out = []
    for m in (2, 3):
        Z = [[0] * m for _ in range(m)]
        out.append(Z)
        for i in range(m):
            row = [r[:] for r in Z]
            row[i][i] = -1
            out.append(row)                                  # a single nonzero entry
        out.append([[1 if c == 0 else 0 for c in range(m)] for _ in range(m)])   # rank one
        out.append([[-1 if r == c else 0 for c in range(m)] for r in range(m - 1)] + [[0] * m])
        out.append([[-1 if r == c else (1 if c == 0 else 0) for c in range(m)] for r in range(m)][:m - 1]
                   + [[-1] + [0] * (m - 1)])                 # repeated column direction
    out.append([[-1, 1], [1, -1]])                           # singular A, regular diagonal
    out.append([[1, 1], [1, 1]])
    out.append([[-1, 0, 0], [0, -1, 0], [1, 1, 0]])
    out.append([[2, 4], [1, 2]])
    out.append([[0, 1], [0, 0]])
    out.append([[0, 0, 1], [0, 0, 0], [0, 0, 0]])
    out.append([[Fraction(1, 2), 1], [Fraction(1, 4), Fraction(1, 2)]])
    return [RationalMatrix(len(r), len(r), [x for row in r for x in row]) for r in out][:20]


def test_criterion_01_condition_equivalence():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    instances = []
    for k in range(1000):
        m = 2 + k % 2
        instances.append((random_rational_matrix(rng, m, zero_prob=0.3 if k % 3 == 0 else 0.0), 1 + (k // 2) % 2))
    crafted = _degenerate_instances()
    instances += [(A, 1 + k % 2) for k, A in enumerate(crafted)]
    mismatches, infeasible = 0, 0
    for A, d in instances:
        try:
            rep = check_conditions(CubicalData(A.rows, d, A))
        except EquivalenceViolation:
            mismatches += 1
            continue
        mismatches += rep.condition1 != rep.condition2
        infeasible += not rep.feasible
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and len(crafted) == 20 and elapsed < 10.0
    report(1, ok, f"{len(instances)} instances ({infeasible} infeasible), {mismatches} mismatches, "
                  f"{elapsed:.2f}s")


def _telescoping_instances(rng, norm_sampler=None, count=50):
    """Random ``(xi, d)`` with ``d`` in {1, 2}, ``l`` in {0, 1, 2}; optionally rescaled norms."""
    out = []
    for k in range(count):
        d, l = 1 + k % 2, k % 3
        xi = rng.normal(size=d * (l + 1))
        if norm_sampler is not None:
            xi *= norm_sampler(rng) / np.linalg.norm(xi)
        out.append((xi, d))
    return out


def test_criterion_02a_telescoping_within_valid_frequency_range():
    # over (1e-3, 1e3) the window loss pi (1 - e^{-2 pi 1e-6 |xi|^2}) stays below 1e-6
    # only for |xi| <= 0.22 (and the upper cut-off only for |xi| >= 0.002)
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    inst = _telescoping_instances(rng, lambda r: 10 ** r.uniform(-2, math.log10(0.2)))
    errs = [abs(telescoping_integral(xi, 1e-3, 1e3, d) - math.pi) for xi, d in inst]
    elapsed = time.perf_counter() - t0
    report("2a", max(errs) <= 1e-6 and elapsed < 5.0,
           f"max |I - pi| = {max(errs):.2e} over 50 xi with |xi| in [0.01, 0.2], {elapsed:.2f}s")


@pytest.mark.xfail(strict=True, reason="window (1e-3, 1e3) loses ~2 pi^2 1e-6 |xi|^2 of the integral; "
                                       "1e-6 is unreachable for |xi| of order one")
def test_criterion_02b_telescoping_literal_standard_normal_xi():
    rng = np.random.default_rng(203)
    inst = _telescoping_instances(rng)
    vals = [(telescoping_integral(xi, 1e-3, 1e3, d), telescoping_closed_form(xi, 1e-3, 1e3, d))
            for xi, d in inst]
    quad_vs_closed = max(abs(q - c) for q, c in vals)
    err = max(abs(q - math.pi) for q, _ in vals)
    line = (f"criterion 2b: {'PASS' if err <= 1e-6 else 'FAIL'}  xi ~ N(0, I): max |I - pi| = {err:.2e} "
            f"(quadrature vs closed form {quad_vs_closed:.1e}; the deficit is the window truncation)")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert err <= 1e-6


def test_criterion_03_heat_and_convolution_identities():
    rng = np.random.default_rng(303)
    worst = 0.0
    for k in range(100):
        kind = ("heat", "heat-vector", "convolution")[k % 3]
        t = rng.uniform(0.2, 3.0)
        if kind == "heat":
            r = gaussian_identity_check(kind, eta=rng.uniform(0.05, 3.0) * rng.choice([-1, 1]), t=t)
        elif kind == "heat-vector":
            r = gaussian_identity_check(kind, xi=rng.normal(size=int(rng.integers(2, 4))), t=t)
        else:
            r = gaussian_identity_check(kind, s1=rng.uniform(-3, 3), s0=rng.uniform(-3, 3), t=t)
        worst = max(worst, r)
    report(3, worst <= 1e-7, f"max residual {worst:.2e} over 100 points")


def test_criterion_04_am_gm_delta_bound():
    rng = np.random.default_rng(404)
    count, worst = 0, 0.0
    while count < 100:
        A = random_rational_matrix(rng, 2)
        if not check_conditions(CubicalData(2, 1, A)).feasible:
            continue
        tup = FunctionAssignment({j: GaussianMixture.random(2, rng, 1).normalized(4) for j in corners(2)})
        worst = max(worst, eval_delta_form(A, tup).value / am_gm_bound(A))
        count += 1
    eq = eval_delta_form(R("-1 0; 0 -1"), FunctionAssignment.uniform(2, GaussianMixture.standard(2).normalized(4)))
    ok = worst <= 1 + 1e-12 and abs(eq.value - 1.0) <= 1e-9
    report(4, ok, f"max Lambda/bound = {worst:.6f} over 100 feasible A; equality case ratio {eq.value:.12f}")


def test_criterion_05_symmetry_invariance():
    rng = np.random.default_rng(505)
    worst = 0.0
    for k in range(50):
        m, d = 2 + k % 2, 1 + (k // 2) % 2
        A = random_rational_matrix(rng, m)
        data = CubicalData(m, d, A)
        tup = FunctionAssignment({j: GaussianMixture.random(m * d, rng, 2) for j in corners(m)})
        K = HeatDifference(float(rng.uniform(1.5, 16.0)))
        diag = [Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4))) * (1 if rng.random() < 0.5 else -1)
                for _ in range(m)]
        D = RationalMatrix.diag(diag)
        perm = [int(p) for p in rng.permutation(m)]
        for res in (apply_symmetry("scale", data, tup, K, D=D), apply_symmetry("permute", data, tup, K, perm=perm)):
            worst = max(worst, res.rel_error)
    report(5, worst <= 1e-9, f"max relative error {worst:.2e} over 50 configurations (scale and permute)")


def test_criterion_06_boundedness_sweep():
    tup = FunctionAssignment.uniform(2, GaussianMixture.standard(2).normalized(4))
    sw = sweep_truncation(R("-1 0; 0 -1"), tup, [2.0**k for k in range(1, 13)])
    ratios = [r[2] for r in sw.rows]
    bounded = max(ratios) <= sw.dirac_ratio * (1 + 1e-12)
    late = [abs(x) for x in sw.differences[7:]]       # differences between T = 2^8, ..., 2^12
    ok = bounded and max(late) <= 1e-3
    report(6, ok, f"sup ratio {max(ratios):.9f} <= Dirac limit {sw.dirac_ratio:.9f}; "
                  f"max difference beyond 2^8 = {max(late):.2e}")


def test_criterion_07_blowup_slopes():
    t0 = time.perf_counter()
    a = blowup_experiment(R("1 0"), [R("1 0"), R("0 1")], [2, 2], [(0, 1)], R_LIST)
    b = blowup_cubical(CubicalData(2, 1, R("0 0; 0 0")), R_LIST)
    elapsed = time.perf_counter() - t0
    ok = (abs(a.slope - float(a.predicted_gap)) <= 0.2 and abs(b.slope - float(b.predicted_gap)) <= 0.2
          and elapsed < 30.0)
    report(7, ok, f"slopes {a.slope:.4f} (gap {a.predicted_gap}) and {b.slope:.4f} (gap {b.predicted_gap}), "
                  f"{elapsed:.2f}s")


def test_criterion_08_stick_search():
    rng = np.random.default_rng(808)
    found, fails, deltas = 0, [], []
    while found < 20:
        m = 2 + found % 2
        l = found % 2
        entries = [Fraction(int(x), 8) for x in rng.integers(-2, 3, size=(m - l) * m)]
        rows = [[Fraction(-1) if c == r else Fraction(0) for c in range(m)] for r in range(l)]
        rows += [[(Fraction(-1) if c == r else Fraction(0)) + entries[(r - l) * m + c] for c in range(m)]
                 for r in range(l, m)]
        A = RationalMatrix(m, m, [x for row in rows for x in row])
        if not satisfies_epsilon_hypothesis(A, Fraction(1, 2)):
            continue
        g = rng.normal(size=m - l)
        g /= np.linalg.norm(g)
        res = stick_search(A, Fraction(1, 2), l, g)
        fine = verify_stick(A, l, g, res, factor=10)
        deltas.append(res.delta)
        if not (res.delta > 0 and fine > res.delta):
            fails.append((str(A), res.delta, fine))
        found += 1
    report(8, not fails, f"20 instances, delta in [{min(deltas):.3g}, {max(deltas):.3g}], "
                         f"{len(fails)} certificates broken on the 10x grid")


def test_criterion_09_cone_partition():
    delta = 0.05
    cp = cone_partition(2, delta)
    G = cp.gamma_set
    pair = np.sqrt(np.sum((G[:, None, :] - G[None, :, :]) ** 2, axis=-1))
    sep = pair[np.triu_indices(len(G), 1)].min()
    cover = cp.covering_radius(10_000, seed=9)
    xi = np.random.default_rng(909).normal(size=(10_000, 2))
    wsum = np.abs(cp.weights(xi).sum(axis=1) - 1).max()
    ok = sep >= delta / 6 and cover <= delta / 2 and wsum <= 1e-12
    report(9, ok, f"|Gamma| = {len(G)}, min separation {sep:.6f} (>= {delta / 6:.6f}), "
                  f"covering {cover:.5f} (<= {delta / 2}), weight-sum error {wsum:.1e}")


def test_criterion_10_cramer_bound():
    rng = np.random.default_rng(1010)
    count, worst = 0, Fraction(0)
    while count < 100:
        m = 2 + count % 2
        eps = Fraction(1, int(rng.integers(2, 9)))
        A = random_rational_matrix(rng, m, num=3, den=2)
        if not satisfies_epsilon_hypothesis(A, eps):
            continue
        lhs = hs_norm_sq(inverse(A))
        bound = (m * eps ** (-m)) ** 2
        worst = max(worst, lhs / bound)
        count += 1
    report(10, worst <= 1, f"max ||A^-1||_HS^2 / bound = {float(worst):.4f} over 100 A (exact)")


def test_criterion_11_monte_carlo_oracle():
    rng = np.random.default_rng(1111)
    worst, bad = 0.0, 0
    for k in range(20):
        A = random_rational_matrix(rng, 2)
        while not check_conditions(CubicalData(2, 1, A)).feasible:
            A = random_rational_matrix(rng, 2)
        tup = FunctionAssignment({j: GaussianMixture.random(2, rng, 2) for j in corners(2)})
        exact = eval_delta_form(A, tup).value
        mc = eval_form(Dirac(), A, tup, method="monte-carlo", samples=1_000_000, seed=1000 + k)
        z = abs(mc.value - exact) / mc.std_error
        worst = max(worst, z)
        bad += z > 3
    report(11, bad == 0, f"max |MC - exact| / SE = {worst:.2f} over 20 instances at 1e6 samples")


def test_criterion_12_trilinear_classifier():
    expected = {"0 0; 0 0": TrilinearCase.TRIVIAL, "1 0; 0 1": TrilinearCase.TRIVIAL,
                "2 1; 1 3": TrilinearCase.GENERIC_BHT, "0 0; 0 2": TrilinearCase.HYBRID,
                "1 0; 0 0": TrilinearCase.TWISTED_PARAPRODUCT}
    got = {k: classify_trilinear(R(k)) for k in expected}
    ok = got == expected
    report(12, ok, ", ".join(f"[{k}] -> {v.value}" for k, v in got.items()))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
