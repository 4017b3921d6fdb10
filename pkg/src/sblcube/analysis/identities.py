"""Gaussian identities behind the telescoping argument, checked numerically.

Fourier convention: ``f^(xi) = int f(x) exp(-2 pi i x.xi) dx``, so the Gaussian
``g(x) = exp(-pi |x|^2)`` is its own transform and
``(d_k g)^(xi) = 2 pi i xi_k g^(xi)``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

FD_STEP = 1e-5


def ghat_sq(z):
    """``|g^(z)|^2 = exp(-2 pi |z|^2)`` for a vector (or scalar) ``z``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return float(np.prod(np.exp(-2.0 * math.pi * z * z)))


def dghat_sq(z, k):
    """``|(d_k g)^(z)|^2 = 4 pi^2 z_k^2 |g^(z)|^2``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return 4.0 * math.pi**2 * z[k] ** 2 * ghat_sq(z)


def g_dilated(x, t):
    """``g_t(x) = t^{-1} g(x / t)`` on the line."""
    return math.exp(-math.pi * (x / t) ** 2) / t


def _heat_residual(eta, t, h=FD_STEP):
    lhs = -t * (ghat_sq((t + h) * eta) - ghat_sq((t - h) * eta)) / (2 * h)
    rhs = dghat_sq(t * eta, 0) / math.pi
    return abs(lhs - rhs)


def _heat_vector_residual(xi, t, h=FD_STEP):
    xi = np.asarray(xi, dtype=float)
    lhs = -t * (ghat_sq((t + h) * xi) - ghat_sq((t - h) * xi)) / (2 * h)
    rhs = sum(dghat_sq(t * xi, k) for k in range(xi.size)) / math.pi
    return abs(lhs - rhs)


def _convolution_residual(s1, s0, t):
    lhs = g_dilated(s1 - s0, math.sqrt(2.0) * t)
    mid = 0.5 * (s1 + s0)
    # integrand is negligible beyond 40t from the midpoint
    rhs, _ = integrate.quad(lambda p: g_dilated(s1 - p, t) * g_dilated(s0 - p, t),
                            mid - 40 * t, mid + 40 * t, points=[mid],
                            epsabs=1e-14, epsrel=1e-12, limit=200)
    return abs(lhs - rhs)


def _heat_equation_residual(s, t, h=FD_STEP):
    # d_t g_t(s) = t/(2 pi) d_s^2 g_t(s); d_s^2 taken analytically
    lhs = (g_dilated(s, t + h) - g_dilated(s, t - h)) / (2 * h)
    d2 = g_dilated(s, t) * (4 * math.pi**2 * s**2 / t**4 - 2 * math.pi / t**2)
    return abs(lhs - t / (2 * math.pi) * d2)


def gaussian_identity_check(kind: str, **params) -> float:
    """Absolute residual of one Gaussian identity.

    kind
        ``"heat"`` (``eta``, ``t``), ``"heat-vector"`` (``xi``, ``t``),
        ``"convolution"`` (``s1``, ``s0``, ``t``) or ``"heat-equation"``
        (``s``, ``t``).
    """
    t = float(params.get("t", 1.0))
    if t <= 0:
        raise ValueError("t must be positive")
    if kind == "heat":
        eta = float(params["eta"])
        if eta == 0:
            raise ValueError("eta must be nonzero")
        return _heat_residual(eta, t)
    if kind == "heat-vector":
        xi = np.asarray(params["xi"], dtype=float)
        if not np.any(xi):
            raise ValueError("xi must be nonzero")
        return _heat_vector_residual(xi, t)
    if kind == "convolution":
        return _convolution_residual(float(params["s1"]), float(params["s0"]), t)
    if kind == "heat-equation":
        return _heat_equation_residual(float(params["s"]), t)
    raise ValueError(f"unknown identity kind {kind!r}")


def _blocks(xi, d):
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.size % d:
        raise ValueError(f"vector of length {xi.size} is not a multiple of d={d}")
    return xi.reshape(-1, d)


def telescoping_integrand(t, blocks):
    """``sum_i sum_k |(d_k g)^(t xi_i)|^2 prod_{j != i} |g^(t xi_j)|^2``."""
    total = 0.0
    for i, xi_i in enumerate(blocks):
        others = 1.0
        for j, xi_j in enumerate(blocks):
            if j != i:
                others *= ghat_sq(t * xi_j)
        total += others * sum(dghat_sq(t * xi_i, k) for k in range(xi_i.size))
    return total


def telescoping_integral(xi, t_min: float, t_max: float, d: int = 1) -> float:
    """Adaptive quadrature of the telescoping integrand against ``dt/t``."""
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    blocks = _blocks(xi, d)
    norm = float(np.linalg.norm(blocks))
    if norm == 0:
        raise ValueError("xi must be nonzero")
    lo, hi = math.log(t_min), math.log(t_max)
    peak = -math.log(norm)
    pts = [p for p in (peak - 3, peak, peak + 2) if lo < p < hi]
    val, _ = integrate.quad(lambda u: telescoping_integrand(math.exp(u), blocks), lo, hi,
                            points=pts or None, epsabs=1e-13, epsrel=1e-12, limit=400)
    return val


def telescoping_closed_form(xi, t_min: float, t_max: float, d: int = 1) -> float:
    """``pi * (prod_j |g^(t_min xi_j)|^2 - prod_j |g^(t_max xi_j)|^2)``."""
    blocks = _blocks(xi, d)
    lo = math.prod(ghat_sq(t_min * b) for b in blocks)
    hi = 0.0 if math.isinf(t_max) else math.prod(ghat_sq(t_max * b) for b in blocks)
    return math.pi * (lo - hi)


def annular_profile(v):
    """Radial profile ``2 pi |v|^2 exp(-pi |v|^2)`` (argument is the radius)."""
    return 2.0 * math.pi * v * v * math.exp(-math.pi * v * v)


def annular_profile_check(s) -> float:
    """``int_0^inf phi(t s) dt/t``, which equals 1 for every ``s != 0``."""
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(s, dtype=float))))
    if r == 0:
        raise ValueError("s must be nonzero")
    c = -math.log(r)
    val, _ = integrate.quad(lambda u: annular_profile(math.exp(u) * r), c - 30.0, c + 6.0,
                            points=[c - 1.0, c, c + 1.0], epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def gaussian_domination(s, v):
    """``(g(s + v), 10 g(s / (2 + 2|v|)))``; the first never exceeds the second."""
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    lhs = math.exp(-math.pi * float(np.sum((s + v) ** 2)))
    a = 2.0 + 2.0 * float(np.linalg.norm(v))
    rhs = 10.0 * math.exp(-math.pi * float(np.sum(s * s)) / a**2)
    return lhs, rhs
