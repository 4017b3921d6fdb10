"""Gaussian mixtures and exact Gaussian integrals.

Everything here uses the ``exp(-pi x^T Q x)`` normalization, for which
``int exp(-pi x^T Q x + 2 pi b.x + c) dx = det(Q)^{-1/2} exp(pi b^T Q^{-1} b + c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Sequence

import numpy as np

MAX_TERMS = 10**6


class DefinitenessError(ValueError):
    """A quadratic form that must be positive definite is not."""


class TermCountError(OverflowError):
    """A mixture expansion would exceed ``MAX_TERMS`` terms."""


def _cholesky(Q):
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DefinitenessError(f"quadratic form must be square, got shape {Q.shape}")
    if not np.allclose(Q, Q.T, rtol=1e-12, atol=1e-14 * (1 + np.abs(Q).max(initial=0))):
        raise DefinitenessError("quadratic form is not symmetric")
    try:
        return np.linalg.cholesky(0.5 * (Q + Q.T))
    except np.linalg.LinAlgError:
        raise DefinitenessError("quadratic form is not positive definite") from None


def gaussian_log_integral(quad, lin=None, const=0.0):
    """Log of ``int exp(-pi x^T Q x + 2 pi b.x + c) dx``."""
    L = _cholesky(quad)
    n = L.shape[0]
    b = np.zeros(n) if lin is None else np.asarray(lin, dtype=float)
    y = np.linalg.solve(L, b)
    logdet = 2.0 * np.log(np.diag(L)).sum()
    return -0.5 * logdet + math.pi * float(y @ y) + float(const)


def gaussian_integral_exact(quad, lin=None, const=0.0) -> float:
    """``det(Q)^{-1/2} exp(pi b^T Q^{-1} b + c)`` for symmetric positive-definite ``Q``."""
    return math.exp(gaussian_log_integral(quad, lin, const))


@dataclass
class QuadExp:
    """``coeff * exp(-pi x^T Q x + 2 pi b.x + c)`` with ``Q`` only required PSD.

    Pullbacks of mixtures along non-injective maps land here; products of
    these stay here; :meth:`integrate` needs the final ``Q`` to be definite.
    """

    coeff: float
    Q: np.ndarray
    b: np.ndarray
    c: float = 0.0

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def __mul__(self, other: "QuadExp") -> "QuadExp":
        return QuadExp(self.coeff * other.coeff, self.Q + other.Q, self.b + other.b, self.c + other.c)

    def pullback(self, L, shift=None) -> "QuadExp":
        """Compose with ``w -> L w + shift``."""
        L = np.asarray(L, dtype=float)
        s = np.zeros(L.shape[0]) if shift is None else np.asarray(shift, dtype=float)
        Qs = self.Q @ s
        return QuadExp(
            self.coeff,
            L.T @ self.Q @ L,
            L.T @ (self.b - Qs),
            self.c - math.pi * float(s @ Qs) + 2 * math.pi * float(self.b @ s),
        )

    def integrate(self) -> float:
        if self.coeff == 0:
            return 0.0
        return self.coeff * gaussian_integral_exact(self.Q, self.b, self.c)

    def mean_cov(self):
        """Mean and covariance of the normalized density ``∝ exp(-pi x^T Q x + 2 pi b.x)``."""
        L = _cholesky(self.Q)
        Qinv = np.linalg.inv(self.Q)
        mean = np.linalg.solve(L.T, np.linalg.solve(L, self.b))
        return mean, Qinv / (2.0 * math.pi)

    def integrate_bilinear(self, la, ca, lb, cb) -> float:
        """``int (la.x + ca)(lb.x + cb) * self(x) dx`` exactly."""
        if self.coeff == 0:
            return 0.0
        mean, cov = self.mean_cov()
        la, lb = np.asarray(la, dtype=float), np.asarray(lb, dtype=float)
        second = float(la @ cov @ lb) + (float(la @ mean) + ca) * (float(lb @ mean) + cb)
        return self.integrate() * second

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        e = -math.pi * np.einsum("ni,ij,nj->n", x, self.Q, x) + 2 * math.pi * x @ self.b + self.c
        return self.coeff * np.exp(e)


@dataclass(frozen=True)
class GaussianTerm:
    coeff: float
    center: tuple
    quad: tuple  # row-major nested tuples, symmetric positive definite

    @property
    def center_array(self) -> np.ndarray:
        return np.array(self.center, dtype=float)

    @property
    def quad_array(self) -> np.ndarray:
        return np.array(self.quad, dtype=float)

    def as_quadexp(self) -> QuadExp:
        M = self.quad_array
        mu = self.center_array
        Mmu = M @ mu
        return QuadExp(float(self.coeff), M, Mmu, -math.pi * float(mu @ Mmu))


class GaussianMixture:
    """Finite sum of ``coeff * exp(-pi (x - center)^T quad (x - center))``.

    Parameters
    ----------
    terms : sequence of (coeff, center, quad)
        ``quad`` must be symmetric positive definite; all terms share one
        dimension.
    dim : int, optional
        Required only for the empty (zero) mixture.
    """

    def __init__(self, terms: Sequence, dim: int | None = None):
        ts = []
        for t in terms:
            if isinstance(t, GaussianTerm):
                coeff, center, quad = t.coeff, t.center_array, t.quad_array
            else:
                coeff, center, quad = t
            center = np.atleast_1d(np.asarray(center, dtype=float))
            quad = np.atleast_2d(np.asarray(quad, dtype=float))
            if quad.shape != (center.size, center.size):
                raise ValueError(f"quad shape {quad.shape} does not match center of length {center.size}")
            _cholesky(quad)
            ts.append(GaussianTerm(float(coeff), tuple(center.tolist()),
                                   tuple(map(tuple, (0.5 * (quad + quad.T)).tolist()))))
        dims = {len(t.center) for t in ts}
        if len(dims) > 1:
            raise ValueError(f"inconsistent term dimensions {sorted(dims)}")
        if ts:
            dim = dims.pop()
        elif dim is None:
            raise ValueError("empty mixture needs an explicit dim")
        self.terms = tuple(ts)
        self.dim = int(dim)

    # constructors -----------------------------------------------------------

    @classmethod
    def standard(cls, dim: int, width: float = 1.0, coeff: float = 1.0, center=None) -> "GaussianMixture":
        """``coeff * g((x - center)/width)`` with ``g(x) = exp(-pi |x|^2)``."""
        c = np.zeros(dim) if center is None else center
        return cls([(coeff, c, np.eye(dim) / width**2)])

    @classmethod
    def zero(cls, dim: int) -> "GaussianMixture":
        return cls([], dim=dim)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, n_terms: int = 1,
               spread: float = 1.0, positive: bool = True) -> "GaussianMixture":
        """Random well-conditioned mixture (eigenvalues of each quad in [0.5, 2])."""
        terms = []
        for _ in range(n_terms):
            Qo, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
            M = Qo @ np.diag(rng.uniform(0.5, 2.0, size=dim)) @ Qo.T
            coeff = rng.uniform(0.5, 1.5) if positive else rng.uniform(-1.0, 1.0)
            terms.append((coeff, rng.normal(scale=spread, size=dim), M))
        return cls(terms)

    # transforms -------------------------------------------------------------

    def scaled(self, c: float) -> "GaussianMixture":
        return GaussianMixture([(c * t.coeff, t.center, t.quad) for t in self.terms], dim=self.dim)

    def compose_linear(self, L) -> "GaussianMixture":
        """``y -> F(L y)`` for invertible ``L``."""
        L = np.asarray(L, dtype=float)
        Linv = np.linalg.inv(L)
        return GaussianMixture(
            [(t.coeff, Linv @ t.center_array, L.T @ t.quad_array @ L) for t in self.terms], dim=self.dim)

    def normalized(self, p: int) -> "GaussianMixture":
        n = lp_norm(self, p)
        if n == 0:
            raise ZeroDivisionError("cannot normalize the zero function")
        return self.scaled(1.0 / n)

    def quadexps(self) -> list:
        return [t.as_quadexp() for t in self.terms]

    def pullback(self, L, shift=None) -> list:
        """Terms of ``w -> F(L w + shift)`` as :class:`QuadExp` (possibly degenerate)."""
        return [q.pullback(L, shift) for q in self.quadexps()]

    # evaluation -------------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[-1] != self.dim:
            raise ValueError(f"points of dimension {x.shape[-1]} for a {self.dim}-dim mixture")
        out = np.zeros(x.shape[0])
        for t in self.terms:
            diff = x - t.center_array
            out += t.coeff * np.exp(-math.pi * np.einsum("ni,ij,nj->n", diff, t.quad_array, diff))
        return out[0] if single else out

    def integral(self) -> float:
        return sum(q.integrate() for q in self.quadexps())

    def __eq__(self, other):
        return isinstance(other, GaussianMixture) and self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, self.terms))

    def __repr__(self):
        return f"GaussianMixture(dim={self.dim}, n_terms={len(self.terms)})"

    def to_dict(self) -> dict:
        return {"dim": self.dim,
                "terms": [{"coeff": t.coeff, "center": list(t.center), "quad": [list(r) for r in t.quad]}
                          for t in self.terms]}

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianMixture":
        return cls([(t["coeff"], t["center"], t["quad"]) for t in d["terms"]], dim=d["dim"])


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def lp_norm(F: GaussianMixture, p: int) -> float:
    """``(int F^p)^{1/p}`` for even ``p`` by exact multinomial expansion."""
    if isinstance(p, float) and p.is_integer():
        p = int(p)
    if not isinstance(p, (int, np.integer)) or p <= 0 or p % 2:
        raise ValueError(f"exact L^p norm needs an even positive integer p, got {p!r}; "
                         "use lp_norm_monte_carlo for other exponents")
    K = len(F.terms)
    if K == 0:
        return 0.0
    if math.comb(K + p - 1, p) > MAX_TERMS:
        raise TermCountError(f"expanding a {K}-term mixture to power {p} needs "
                             f"{math.comb(K + p - 1, p)} terms (cap {MAX_TERMS})")
    qs = F.quadexps()
    total = 0.0
    for comp in _compositions(p, K):
        mult = math.factorial(p)
        coeff = 1.0
        Q = np.zeros((F.dim, F.dim))
        b = np.zeros(F.dim)
        c = 0.0
        for n_k, q in zip(comp, qs):
            if n_k:
                mult //= math.factorial(n_k)
                coeff *= q.coeff ** n_k
                Q = Q + n_k * q.Q
                b = b + n_k * q.b
                c += n_k * q.c
        total += mult * coeff * gaussian_integral_exact(Q, b, c)
    return max(total, 0.0) ** (1.0 / p)


def lp_norm_monte_carlo(F, p: float, dim: int, samples: int = 200_000, seed: int = 0,
                        scale: float = 2.0):
    """``(int |F|^p)^{1/p}`` by importance sampling from ``N(0, scale^2 I / 2pi)``.

    Returns ``(value, std_error_of_integral)``.
    """
    rng = np.random.default_rng(seed)
    sigma = scale / math.sqrt(2 * math.pi)
    x = rng.normal(scale=sigma, size=(samples, dim))
    q = np.exp(-0.5 * np.sum(x**2, axis=1) / sigma**2) / (2 * math.pi * sigma**2) ** (dim / 2)
    w = np.abs(F(x)) ** p / q
    est = float(w.mean())
    return est ** (1.0 / p), float(w.std(ddof=1) / math.sqrt(samples))


def product_of_pullbacks(factors: Sequence[list]) -> list:
    """Expand a product of sums of :class:`QuadExp` into a flat list of terms."""
    count = 1
    for f in factors:
        count *= max(len(f), 1)
    if count > MAX_TERMS:
        raise TermCountError(f"product expansion needs {count} terms (cap {MAX_TERMS})")
    out = []
    for combo in iproduct(*factors):
        acc = combo[0]
        for q in combo[1:]:
            acc = acc * q
        out.append(acc)
    return out
