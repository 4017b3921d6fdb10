import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sblcube.gaussian import (DefinitenessError, GaussianMixture, QuadExp, TermCountError,
                              gaussian_integral_exact, lp_norm, lp_norm_monte_carlo)


def random_spd(rng, n):
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return Q @ np.diag(rng.uniform(0.5, 2.0, n)) @ Q.T


def test_integral_examples():
    assert gaussian_integral_exact(np.eye(3)) == pytest.approx(1.0, abs=1e-15)
    assert gaussian_integral_exact([[2.0]]) == pytest.approx(2**-0.5, abs=1e-15)


def test_integral_rejects_non_pd():
    with pytest.raises(DefinitenessError):
        gaussian_integral_exact([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(DefinitenessError):
        gaussian_integral_exact([[1.0, 2.0], [0.0, 1.0]])


def test_integral_against_monte_carlo(rng):
    Q = random_spd(rng, 4)
    b = rng.normal(size=4) * 0.3
    exact = gaussian_integral_exact(Q, b, 0.1)
    cov = np.linalg.inv(Q) / (2 * math.pi)
    mean = np.linalg.solve(Q, b)
    x = rng.multivariate_normal(mean, 2 * cov, size=10**6)
    f = np.exp(-math.pi * np.einsum("ni,ij,nj->n", x, Q, x) + 2 * math.pi * x @ b + 0.1)
    L = np.linalg.cholesky(2 * cov)
    z = np.linalg.solve(L, (x - mean).T)
    q = np.exp(-0.5 * np.sum(z * z, 0)) / ((2 * math.pi) ** 2 * np.prod(np.diag(L)))
    assert abs(np.mean(f / q) - exact) / exact <= 0.01


@given(st.integers(1, 4), st.integers(0, 10**6))
def test_integral_matches_direct_quadrature_in_1d_marginals(n, seed):
    rng = np.random.default_rng(seed)
    lam = rng.uniform(0.3, 3.0, n)
    b = rng.normal(size=n)
    exact = gaussian_integral_exact(np.diag(lam), b)
    direct = math.prod(math.exp(math.pi * bi * bi / li) / math.sqrt(li) for li, bi in zip(lam, b))
    assert exact == pytest.approx(direct, rel=1e-12)


def test_lp_norm_examples():
    for n in (1, 2, 3):
        assert lp_norm(GaussianMixture.standard(n), 2) == pytest.approx(2 ** (-n / 4), rel=1e-14)
    assert lp_norm(GaussianMixture.standard(2), 4) == pytest.approx(4 ** -0.25, rel=1e-14)
    assert lp_norm(GaussianMixture.zero(3), 4) == 0.0


def test_lp_norm_odd_exponent_rejected():
    with pytest.raises(ValueError):
        lp_norm(GaussianMixture.standard(1), 3)


def test_lp_norm_term_cap():
    rng = np.random.default_rng(0)
    F = GaussianMixture.random(1, rng, n_terms=40)
    with pytest.raises(TermCountError):
        lp_norm(F, 16)


def test_lp_norm_mixture_matches_monte_carlo(rng):
    F = GaussianMixture.random(2, rng, n_terms=3, spread=0.5)
    exact = lp_norm(F, 4)
    mc, se = lp_norm_monte_carlo(F, 4, 2, samples=400_000, seed=1, scale=3.0)
    assert mc ** 4 == pytest.approx(exact**4, abs=5 * se)


def test_normalized_has_unit_norm(rng):
    F = GaussianMixture.random(2, rng, n_terms=2)
    assert lp_norm(F.normalized(4), 4) == pytest.approx(1.0, rel=1e-12)


@given(st.integers(0, 10**6))
def test_quadexp_pullback_and_product_evaluate_pointwise(seed):
    rng = np.random.default_rng(seed)
    F = GaussianMixture.random(2, rng, n_terms=2)
    L = rng.normal(size=(2, 3))
    s = rng.normal(size=2)
    w = rng.normal(size=(5, 3))
    direct = F(w @ L.T + s)
    via = sum(q(w) for q in F.pullback(L, s))
    np.testing.assert_allclose(via, direct, rtol=1e-10, atol=1e-300)


def test_bilinear_moment_matches_quadrature():
    q = QuadExp(1.3, np.array([[1.5]]), np.array([0.4]), 0.2)
    xs = np.linspace(-12, 12, 200001)
    f = q(xs[:, None])
    numeric = np.trapezoid((2 * xs + 1) * (xs - 0.5) * f, xs)
    assert q.integrate_bilinear([2.0], 1.0, [1.0], -0.5) == pytest.approx(numeric, rel=1e-9)


def test_mixture_serialization_round_trip(rng):
    F = GaussianMixture.random(3, rng, n_terms=2)
    assert GaussianMixture.from_dict(F.to_dict()) == F


def test_mixture_validation():
    with pytest.raises(ValueError):
        GaussianMixture([(1.0, [0.0, 0.0], [[1.0]])])
    with pytest.raises(ValueError):
        GaussianMixture([])
