"""Kernel descriptors, their Fourier multipliers, and symbol-estimate checks.

A kernel ``K`` lives on ``(R^d)^m`` and enters the form through ``K((I A)x)``.
Multipliers are evaluated on arrays of frequencies of shape ``(N, d*m)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Union

import numpy as np

from ..gaussian import GaussianMixture
from ..linalg import RationalMatrix

FD_ORDER_CAP = 4


@dataclass(frozen=True)
class Dirac:
    """``K = delta_0``; the multiplier is identically 1."""

    def describe(self) -> str:
        return "dirac"


@dataclass(frozen=True)
class HeatDifference:
    """Multiplier ``exp(-2 pi |xi|^2 / T^2) - exp(-2 pi T^2 |xi|^2)``.

    ``T = 1`` is allowed and gives the zero kernel.
    """

    T: float

    def __post_init__(self):
        if not self.T >= 1:
            raise ValueError(f"HeatDifference needs T >= 1, got {self.T}")

    def describe(self) -> str:
        return f"heat:T={self.T!r}"


@dataclass(frozen=True)
class DerivGaussScale:
    """Scale-averaged derivative-Gaussian kernel.

    ``K^(xi) = int c(t) ghat_{i,k1,k2}((I A)^T t xi) exp(2 pi i u.t xi) dt/t``
    over ``[t_min, t_max]``, where ``g_{i,k1,k2}`` differentiates ``g`` in
    coordinate ``k1`` of ``x_i^0`` and coordinate ``k2`` of ``x_i^1``
    (indices 1-based). ``c`` is a constant or a callable of ``t`` with
    ``|c| <= 1``; ``u`` defaults to zero.
    """

    i: int
    k1: int
    k2: int
    t_min: float = 1e-3
    t_max: float = 1e3
    u: tuple | None = None
    c: Union[float, Callable] = 1.0

    def __post_init__(self):
        if min(self.i, self.k1, self.k2) < 1:
            raise ValueError("i, k1, k2 are 1-based")
        if not 0 <= self.t_min < self.t_max:
            raise ValueError("need 0 <= t_min < t_max")
        if not callable(self.c) and abs(self.c) > 1:
            raise ValueError("scale weight must satisfy |c| <= 1")
        if self.u is not None:
            object.__setattr__(self, "u", tuple(float(v) for v in self.u))

    @property
    def constant_weight(self) -> bool:
        return not callable(self.c)

    def weight(self, t):
        t = np.asarray(t, dtype=float)
        return self.c(t) if callable(self.c) else np.full(t.shape, float(self.c))

    def coord_pair(self, m: int, d: int) -> tuple:
        """0-based positions of the two differentiated coordinates in ``R^{2dm}``."""
        if self.i > m or self.k1 > d or self.k2 > d:
            raise IndexError(f"(i, k1, k2)=({self.i}, {self.k1}, {self.k2}) out of range for m={m}, d={d}")
        return (self.i - 1) * d + self.k1 - 1, (m + self.i - 1) * d + self.k2 - 1

    def describe(self) -> str:
        s = f"deriv:i={self.i},k1={self.k1},k2={self.k2},tmin={self.t_min!r},tmax={self.t_max!r}"
        if self.constant_weight and self.c != 1.0:
            s += f",c={self.c!r}"
        return s


@dataclass(frozen=True)
class MixtureKernel:
    """A spatial Gaussian-mixture kernel on ``R^{dm}``."""

    mixture: GaussianMixture = field(compare=True)

    def describe(self) -> str:
        return f"mixture:{len(self.mixture.terms)}"


KernelSpec = Union[Dirac, HeatDifference, DerivGaussScale, MixtureKernel]


def heat_difference_mixture(T: float, dim: int) -> GaussianMixture:
    """Spatial form of :class:`HeatDifference` as a two-term mixture."""
    a, b = T * T / 2.0, 1.0 / (2.0 * T * T)
    z = np.zeros(dim)
    I = np.eye(dim)
    return GaussianMixture([(a ** (dim / 2), z, a * I), (-(b ** (dim / 2)), z, b * I)])


def parse_kernel(text: str) -> KernelSpec:
    """Parse ``dirac``, ``heat:T=4`` or ``deriv:i=1,k1=1,k2=1,tmin=..,tmax=..,c=..``."""
    text = text.strip()
    name, _, rest = text.partition(":")
    kv = {}
    if rest:
        for part in rest.split(","):
            k, sep, v = part.partition("=")
            if not sep:
                raise ValueError(f"malformed kernel parameter {part!r}")
            kv[k.strip().lower()] = v.strip()
    try:
        if name == "dirac" and not kv:
            return Dirac()
        if name == "heat":
            return HeatDifference(float(kv.pop("t")))
        if name == "deriv":
            spec = DerivGaussScale(int(kv.pop("i")), int(kv.pop("k1")), int(kv.pop("k2")),
                                   t_min=float(kv.pop("tmin", 1e-3)), t_max=float(kv.pop("tmax", 1e3)),
                                   c=float(kv.pop("c", 1.0)))
            if kv:
                raise ValueError(f"unknown kernel parameters {sorted(kv)}")
            return spec
    except KeyError as exc:
        raise ValueError(f"kernel {name!r} is missing parameter {exc.args[0]!r}") from None
    raise ValueError(f"unknown kernel descriptor {text!r}")


# multipliers ---------------------------------------------------------------


def _as_float(A) -> np.ndarray:
    return A.to_numpy() if isinstance(A, RationalMatrix) else np.atleast_2d(np.asarray(A, dtype=float))


def _split(xi, m: int):
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    n = xi.shape[1]
    if n % m:
        raise ValueError(f"frequency of length {n} is not in (R^d)^{m}")
    return xi, n // m


def block_transpose_apply(A, xi):
    """``A^T xi`` acting blockwise on rows of ``xi`` (shape ``(N, d*m)``)."""
    A = _as_float(A)
    m = A.shape[0]
    xi, d = _split(xi, m)
    blocks = xi.reshape(-1, m, d)
    return np.einsum("ji,njk->nik", A, blocks).reshape(xi.shape)


def deriv_gauss_multiplier(i: int, k1: int, k2: int, A, xi):
    """``ghat_{i,k1,k2}((I A)^T xi)`` in closed form.

    Equals ``(2 pi i xi_{i,k1}) (2 pi i (A^T xi)_{i,k2}) exp(-pi(|xi|^2 + |A^T xi|^2))``.
    Accepts one frequency or an ``(N, d*m)`` array.
    """
    A = _as_float(A)
    m = A.shape[0]
    single = np.ndim(xi) == 1
    xi, d = _split(xi, m)
    if not (1 <= i <= m and 1 <= k1 <= d and 1 <= k2 <= d):
        raise IndexError(f"(i, k1, k2)=({i}, {k1}, {k2}) out of range for m={m}, d={d}")
    eta = block_transpose_apply(A, xi)
    a = xi[:, (i - 1) * d + k1 - 1]
    b = eta[:, (i - 1) * d + k2 - 1]
    s = np.sum(xi * xi, axis=1) + np.sum(eta * eta, axis=1)
    val = -4.0 * math.pi**2 * a * b * np.exp(-math.pi * s) + 0j
    return val[0] if single else val


def log_gauss_legendre(t_min: float, t_max: float, per_decade: int = 64):
    """Nodes ``t`` and weights for ``int f(t) dt/t`` (Gauss-Legendre in ``log t``)."""
    lo, hi = math.log10(t_min), math.log10(t_max)
    n_panels = max(1, math.ceil(hi - lo - 1e-12))
    x, w = np.polynomial.legendre.leggauss(per_decade)
    edges = np.linspace(lo, hi, n_panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w * math.log(10.0))
    return 10.0 ** np.concatenate(nodes), np.concatenate(weights)


def _deriv_multiplier(K: DerivGaussScale, A, xi):
    A = _as_float(A)
    m = A.shape[0]
    xi, d = _split(xi, m)
    K.coord_pair(m, d)
    eta = block_transpose_apply(A, xi)
    a = xi[:, (K.i - 1) * d + K.k1 - 1]
    b = eta[:, (K.i - 1) * d + K.k2 - 1]
    s = math.pi * (np.sum(xi * xi, axis=1) + np.sum(eta * eta, axis=1))
    u = np.zeros(xi.shape[1]) if K.u is None else np.asarray(K.u)
    if K.constant_weight and not np.any(u):
        # int_{t0}^{t1} t^2 exp(-s t^2) dt/t = (exp(-s t0^2) - exp(-s t1^2)) / (2s)
        with np.errstate(invalid="ignore", divide="ignore"):
            hi = np.zeros_like(s) if math.isinf(K.t_max) else np.exp(-s * K.t_max**2)
            frac = (np.exp(-s * K.t_min**2) - hi) / (2.0 * s)
        frac = np.where(s > 0, frac, 0.0)
        return -4.0 * math.pi**2 * float(K.c) * a * b * frac + 0j
    if K.t_min <= 0 or math.isinf(K.t_max):
        raise ValueError("quadrature route needs 0 < t_min < t_max < inf")
    t, w = log_gauss_legendre(K.t_min, K.t_max)
    ut = xi @ u
    cw = K.weight(t) * w
    phase = np.exp(2j * math.pi * np.outer(ut, t))
    gauss = np.exp(-np.outer(s, t * t)) * (t * t)
    return -4.0 * math.pi**2 * a * b * np.sum(gauss * phase * cw, axis=1)


def multiplier(K: KernelSpec, A=None, xi=None):
    """``K^(xi)`` for an ``(N, d*m)`` array (or a single vector)."""
    single = np.ndim(xi) == 1
    X = np.atleast_2d(np.asarray(xi, dtype=float))
    if isinstance(K, Dirac):
        out = np.ones(X.shape[0], dtype=complex)
    elif isinstance(K, HeatDifference):
        r2 = np.sum(X * X, axis=1)
        out = (np.exp(-2 * math.pi * r2 / K.T**2) - np.exp(-2 * math.pi * K.T**2 * r2)) + 0j
    elif isinstance(K, DerivGaussScale):
        if A is None:
            raise ValueError("DerivGaussScale multiplier needs A")
        out = _deriv_multiplier(K, A, X)
    elif isinstance(K, MixtureKernel):
        out = np.zeros(X.shape[0], dtype=complex)
        for term in K.mixture.terms:
            M = term.quad_array
            Minv = np.linalg.inv(M)
            amp = term.coeff / math.sqrt(np.linalg.det(M))
            out += amp * np.exp(-math.pi * np.einsum("ni,ij,nj->n", X, Minv, X)
                                - 2j * math.pi * X @ term.center_array)
    else:
        raise TypeError(f"unknown kernel {K!r}")
    return out[0] if single else out


def sigma_multiplier(A, l: int):
    """``K^_Sigma - pi``, where ``K_Sigma`` sums the untruncated ``c = 1``
    derivative kernels over ``i <= l+1`` and all ``k`` (with ``k1 = k2 = k``).

    When rows ``1..l+1`` of ``A`` are those of ``-I`` this vanishes on the
    slice ``xi_{>l+1} = 0``.
    """
    Af = _as_float(A)
    m = Af.shape[0]

    def f(xi):
        X, d = _split(xi, m)
        total = np.zeros(X.shape[0], dtype=complex)
        for i in range(1, l + 2):
            for k in range(1, d + 1):
                total += _deriv_multiplier(DerivGaussScale(i, k, k, t_min=0.0, t_max=math.inf), Af, X)
        return total - math.pi

    return f


# symbol checks -------------------------------------------------------------


def radial_grid(dim: int, r_min: float = 1e-3, r_max: float = 1e3, n_radii: int = 61,
                n_dirs: int = 16, seed: int = 0) -> np.ndarray:
    """Log-spaced radii times seeded random directions (plus coordinate axes)."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_dirs, dim))
    dirs = np.vstack([np.eye(dim), dirs])
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.logspace(math.log10(r_min), math.log10(r_max), n_radii)
    return (radii[:, None, None] * dirs[None, :, :]).reshape(-1, dim)


def multi_indices(dim: int, order: int):
    """All multi-indices with ``|alpha| <= order``, grouped by total order."""
    for n in range(order + 1):
        for alpha in product(range(n + 1), repeat=dim):
            if sum(alpha) == n:
                yield alpha


def fd_step(norm: float, n: int) -> float:
    """Central-difference step for an order-``n`` derivative at radius ``norm``.

    Roughly balances truncation ``O(h^2)`` against roundoff ``O(eps h^{-n})``.
    """
    return norm * max(1e-4, np.finfo(float).eps ** (1.0 / (n + 2)))


def _stencil(alpha):
    """Offsets (in units of h) and weights of the tensor central difference."""
    per_axis = []
    for a in alpha:
        per_axis.append([(a / 2.0 - k, (-1) ** k * math.comb(a, k)) for k in range(a + 1)])
    offs, wts = [], []
    for combo in product(*per_axis):
        offs.append([o for o, _ in combo])
        wts.append(math.prod(w for _, w in combo))
    return np.array(offs, dtype=float), np.array(wts, dtype=float)


@dataclass
class SymbolCheck:
    worst_ratio: float
    by_order: dict
    order: int
    order_cap: int
    slice_max: float | None = None
    n_points: int = 0

    def to_dict(self) -> dict:
        return {"worst_ratio": self.worst_ratio, "by_order": {str(k): v for k, v in self.by_order.items()},
                "order": self.order, "order_cap": self.order_cap, "slice_max": self.slice_max,
                "n_points": self.n_points}


def cz_symbol_check(K, A=None, order: int = 2, grid=None, l: int | None = None,
                    m: int | None = None) -> SymbolCheck:
    """Sampled Calderon-Zygmund symbol ratios ``|d^alpha K^(xi)| |xi|^{|alpha|}``.

    Parameters
    ----------
    K : KernelSpec or callable
        A callable must map an ``(N, n)`` array to ``N`` multiplier values.
    order : int
        Requested derivative order; capped at ``FD_ORDER_CAP``.
    grid : ndarray (N, n)
        Sample frequencies, none of them zero.
    l : int, optional
        If given, also report ``max |K^|`` on the slice where blocks ``> l``
        vanish (grid points are projected onto it).
    """
    if grid is None:
        raise ValueError("a sampling grid is required")
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    norms = np.linalg.norm(grid, axis=1)
    if np.any(norms == 0):
        raise ValueError("grid must avoid xi = 0")
    f = K if callable(K) and not isinstance(K, (Dirac, HeatDifference, DerivGaussScale, MixtureKernel)) \
        else (lambda X: multiplier(K, A, X))
    n = grid.shape[1]
    cap = min(order, FD_ORDER_CAP)
    by_order = {}
    for alpha in multi_indices(n, cap):
        k = sum(alpha)
        if k == 0:
            vals = np.abs(f(grid))
        else:
            offs, wts = _stencil(alpha)
            h = np.array([fd_step(r, k) for r in norms])
            pts = grid[:, None, :] + h[:, None, None] * offs[None, :, :]
            fv = f(pts.reshape(-1, n)).reshape(grid.shape[0], -1)
            vals = np.abs(fv @ wts) / h**k
        ratio = float(np.max(vals * norms**k))
        by_order[k] = max(by_order.get(k, 0.0), ratio)
    slice_max = None
    if l is not None:
        if m is None:
            m = _as_float(A).shape[0] if A is not None else None
        if m is None:
            raise ValueError("slice check needs m (or A)")
        d = n // m
        sl = grid.copy()
        sl[:, l * d:] = 0.0
        sl = sl[np.linalg.norm(sl, axis=1) > 0]
        slice_max = float(np.max(np.abs(f(sl)))) if len(sl) else 0.0
    return SymbolCheck(max(by_order.values()), by_order, order, cap, slice_max, grid.shape[0])


def export_multiplier_csv(path, K, A, grid) -> None:
    """Write ``xi_1..xi_n, re, im`` rows for external plotting."""
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    vals = np.atleast_1d(multiplier(K, A, grid) if not callable(K) or isinstance(
        K, (Dirac, HeatDifference, DerivGaussScale, MixtureKernel)) else K(grid))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"xi_{k + 1}" for k in range(grid.shape[1])] + ["re", "im"])
        for x, v in zip(grid, vals):
            w.writerow([repr(float(c)) for c in x] + [repr(float(v.real)), repr(float(v.imag))])
