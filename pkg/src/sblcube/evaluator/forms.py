"""Exact evaluation of the forms ``Lambda(K, A)`` on Gaussian-mixture tuples.

``Lambda(K, A) = int prod_j F_j(Pi_j x) K((I A) x) dx`` over ``x`` in
``(R^d)^{2m}``. Every route reduces to sums of integrals
``int exp(-pi w^T Q w + 2 pi b.w + c) dw`` (possibly against a bilinear
polynomial), evaluated in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..analysis.kernels import (DerivGaussScale, Dirac, HeatDifference, MixtureKernel,
                                log_gauss_legendre, heat_difference_mixture)
from ..cube import CubeIndex, FunctionAssignment
from ..gaussian import DefinitenessError, GaussianMixture, QuadExp, product_of_pullbacks
from ..linalg import RationalMatrix, ShapeError


class RouteError(ValueError):
    """The requested evaluation route cannot handle this kernel or tuple."""


@dataclass
class FormResult:
    value: float
    method: str
    std_error: float = 0.0
    evaluations: int = 0
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"value": self.value, "method": self.method, "std_error": self.std_error,
               "evaluations": self.evaluations}
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _A_float(A) -> np.ndarray:
    return A.to_numpy() if isinstance(A, RationalMatrix) else np.atleast_2d(np.asarray(A, dtype=float))


def tuple_dims(A, tup: FunctionAssignment):
    """``(m, d)`` implied by ``A`` and the dimension of the tuple's functions."""
    Af = _A_float(A)
    m = Af.shape[0]
    if Af.shape != (m, m):
        raise ShapeError(f"A must be square, got {Af.shape}")
    # plain callables carry no dimension; with none declared, d = 1
    dims = {F.dim for F in tup.functions.values() if hasattr(F, "dim")}
    if len(dims) > 1:
        raise ShapeError(f"tuple functions have mixed dimensions {sorted(dims)}")
    n = dims.pop() if dims else m
    if n % m:
        raise ShapeError(f"functions on R^{n} do not fit m={m}")
    keys = set(tup.functions)
    if keys != {CubeIndex(b) for b in np.ndindex(*(2,) * m)}:
        raise ShapeError(f"tuple must have one function per corner of the {m}-cube")
    return m, n // m


def _require_gaussian(tup: FunctionAssignment):
    if not tup.is_gaussian():
        raise RouteError("exact route needs every F_j to be a GaussianMixture")


def corner_selector(m: int, d: int, j: CubeIndex) -> np.ndarray:
    """Float ``Pi_j`` (``dm x 2dm``)."""
    P = np.zeros((m * d, 2 * m * d))
    for i in range(m):
        for k in range(d):
            P[i * d + k, (j.bits[i] * m + i) * d + k] = 1.0
    return P


def delta_pullback_matrix(A, j: CubeIndex, d: int) -> np.ndarray:
    """``M_j`` with ``Pi_j(-A x1, x1) = M_j x1``."""
    Af = _A_float(A)
    m = Af.shape[0]
    negA = -np.kron(Af, np.eye(d))
    M = np.eye(m * d)
    for i in range(m):
        if j.bits[i] == 0:
            M[i * d:(i + 1) * d] = negA[i * d:(i + 1) * d]
    return M


def _sum_integrals(terms) -> float:
    total = 0.0
    for q in terms:
        try:
            total += q.integrate()
        except DefinitenessError as exc:
            raise DefinitenessError(f"joint quadratic form is not positive definite: {exc}") from None
    return total


def eval_delta_form(A, tup: FunctionAssignment) -> FormResult:
    """Exact ``Lambda(delta_0, A) = int prod_j F_j(M_j x1) dx1``."""
    _require_gaussian(tup)
    m, d = tuple_dims(A, tup)
    factors = [F.pullback(delta_pullback_matrix(A, j, d)) for j, F in tup.items()]
    terms = product_of_pullbacks(factors)
    return FormResult(_sum_integrals(terms), "exact-gaussian", 0.0, len(terms))


def eval_subspace_form(projections, functions, V_basis) -> FormResult:
    """``int_{R^k} prod_i F_i(P_i N w) dw`` with ``N`` the columns of ``V_basis``.

    This is the Brascamp-Lieb form over ``V = span(V_basis)`` up to the
    constant Jacobian of the parametrization.
    """
    N = np.array([[float(x) for x in v] for v in V_basis]).T
    factors = []
    for P, F in zip(projections, functions):
        Pf = P.to_numpy() if isinstance(P, RationalMatrix) else np.asarray(P, dtype=float)
        factors.append(F.pullback(Pf @ N))
    terms = product_of_pullbacks(factors)
    return FormResult(_sum_integrals(terms), "exact-gaussian", 0.0, len(terms))


def _tuple_factors(tup: FunctionAssignment, m: int, d: int) -> list:
    return [F.pullback(corner_selector(m, d, j)) for j, F in tup.items()]


def _IA(A, d: int) -> np.ndarray:
    Af = _A_float(A)
    m = Af.shape[0]
    return np.hstack([np.eye(m * d), np.kron(Af, np.eye(d))])


def _mixture_form(A, tup, mixture: GaussianMixture, m: int, d: int) -> FormResult:
    if mixture.dim != m * d:
        raise ShapeError(f"kernel on R^{mixture.dim}, expected R^{m * d}")
    factors = _tuple_factors(tup, m, d) + [mixture.pullback(_IA(A, d))]
    terms = product_of_pullbacks(factors)
    return FormResult(_sum_integrals(terms), "exact-gaussian", 0.0, len(terms))


def _deriv_form(A, tup, K: DerivGaussScale, m: int, d: int, per_decade: int = 64) -> FormResult:
    """``int c(t) dt/t int int prod F_j(Pi_j x) (g_ab)_t(x + (-Ap + ut, p)) dp dx``.

    ``(g_ab)_t(z) = t^{-2dm} 4 pi^2 (z_a z_b / t^2) exp(-pi |z|^2 / t^2)``; the
    joint ``(x, p)`` integral is a Gaussian bilinear moment, ``t`` goes by
    Gauss-Legendre in ``log t``.
    """
    if not (K.t_min > 0 and math.isfinite(K.t_max)):
        raise DefinitenessError("ill-posed truncation: the spatial route needs 0 < t_min < t_max < inf")
    n = m * d
    a, b = K.coord_pair(m, d)
    Ad = np.kron(_A_float(A), np.eye(d))
    # z = L (x, p) + shift, with x in R^{2n} and p in R^n
    L = np.zeros((2 * n, 3 * n))
    L[:, :2 * n] = np.eye(2 * n)
    L[:n, 2 * n:] = -Ad
    L[n:, 2 * n:] = np.eye(n)
    u = np.zeros(n) if K.u is None else np.asarray(K.u, dtype=float)
    ext = np.hstack([np.eye(2 * n), np.zeros((2 * n, n))])
    base = product_of_pullbacks([[q.pullback(ext) for q in f] for f in _tuple_factors(tup, m, d)])
    t_nodes, w_nodes = log_gauss_legendre(K.t_min, K.t_max, per_decade)
    cw = K.weight(t_nodes) * w_nodes
    total = 0.0
    for t, c in zip(t_nodes, cw):
        if c == 0:
            continue
        shift = np.concatenate([u * t, np.zeros(n)])
        gq = QuadExp(1.0, np.eye(2 * n) / t**2, np.zeros(2 * n), 0.0).pullback(L, shift)
        pref = 4.0 * math.pi**2 * t ** (-2 * n - 2)
        acc = 0.0
        for q in base:
            try:
                acc += (q * gq).integrate_bilinear(L[a], shift[a], L[b], shift[b])
            except DefinitenessError as exc:
                raise DefinitenessError(f"joint quadratic form is not positive definite: {exc}") from None
        total += c * pref * acc
    return FormResult(total, "exact-gaussian", 0.0, len(base) * len(t_nodes),
                      extra={"t_nodes": len(t_nodes)})


def kernel_mixture(K, dim: int) -> GaussianMixture:
    """Spatial Gaussian-mixture form of a heat-type kernel."""
    if isinstance(K, HeatDifference):
        return heat_difference_mixture(K.T, dim)
    if isinstance(K, MixtureKernel):
        return K.mixture
    raise RouteError(f"{type(K).__name__} has no Gaussian-mixture spatial form")


def eval_form(K, A, tup: FunctionAssignment, method: str = "exact", *, samples: int = 200_000,
              seed: int = 0, shards: int = 8, workers: int | None = None) -> FormResult:
    """Evaluate ``Lambda(K, A)``.

    Parameters
    ----------
    method : {"exact", "monte-carlo"}
        The exact route needs Gaussian-mixture tuples. The Monte Carlo route
        handles Dirac and mixture-type kernels only.
    """
    m, d = tuple_dims(A, tup)
    if method in ("exact", "exact-gaussian"):
        _require_gaussian(tup)
        if isinstance(K, Dirac):
            return eval_delta_form(A, tup)
        if isinstance(K, (HeatDifference, MixtureKernel)):
            return _mixture_form(A, tup, kernel_mixture(K, m * d), m, d)
        if isinstance(K, DerivGaussScale):
            return _deriv_form(A, tup, K, m, d)
        raise RouteError(f"unknown kernel {K!r}")
    if method in ("monte-carlo", "mc"):
        from .montecarlo import mc_delta_form, mc_mixture_form
        if isinstance(K, Dirac):
            return mc_delta_form(A, tup, samples=samples, seed=seed, shards=shards, workers=workers)
        if isinstance(K, (HeatDifference, MixtureKernel)):
            return mc_mixture_form(A, tup, kernel_mixture(K, m * d), samples=samples, seed=seed,
                                   shards=shards, workers=workers)
        raise RouteError(f"Monte Carlo route does not support {type(K).__name__}")
    raise RouteError(f"unknown method {method!r}")
