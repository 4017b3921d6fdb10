"""Separated direction sets on the unit sphere and the cone partition of unity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.spatial.distance import pdist

from .. import _backend

MAX_CANDIDATES = 2_000_000


def _smooth_step(x):
    """``C^inf`` step: 0 for ``x <= 0``, 1 for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def _cube_surface_grid(dim: int, h: float) -> np.ndarray:
    """Points of spacing ``h`` on the faces of ``[-1, 1]^dim``, projected to the sphere."""
    n = int(math.ceil(2.0 / h)) + 1
    axis = np.linspace(-1.0, 1.0, n)
    pts = []
    for face in range(dim):
        for sign in (-1.0, 1.0):
            rest = np.array(list(product(axis, repeat=dim - 1)))
            block = np.insert(rest, face, sign, axis=1)
            pts.append(block)
    pts = np.unique(np.vstack(pts), axis=0)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def sphere_candidates(dim: int, delta: float) -> np.ndarray:
    """Dense candidate directions with covering radius well below ``delta/2``."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    # projection from the cube face shrinks distances, so a face spacing h
    # gives sphere covering radius <= h sqrt(dim-1)/2
    root = math.sqrt(dim - 1)
    for h in (delta / (12.0 * root), delta / (3.0 * root)):
        count = 2 * dim * (int(math.ceil(2.0 / h)) + 1) ** (dim - 1)
        if count <= MAX_CANDIDATES // 10:
            return _cube_surface_grid(dim, h)
    if count <= MAX_CANDIDATES:
        return _cube_surface_grid(dim, h)
    raise ValueError(f"dim={dim}, delta={delta} needs about {count} candidates "
                     f"(cap {MAX_CANDIDATES}); use a larger delta")


@dataclass
class ConePartition:
    """Directions ``gamma_set`` (rows, unit length) with bumps of radius ``delta``.

    ``rho_gamma(w) = S((delta - |w - gamma|) / (delta - inner))`` equals 1 when
    ``|w - gamma| <= inner`` and vanishes when ``|w - gamma| >= delta``.
    """

    gamma_set: np.ndarray
    delta: float
    inner: float

    @property
    def dim(self) -> int:
        return self.gamma_set.shape[1]

    def __len__(self):
        return self.gamma_set.shape[0]

    def bumps(self, directions) -> np.ndarray:
        """``rho_gamma`` at unit directions; shape ``(N, |Gamma|)``."""
        w = np.atleast_2d(np.asarray(directions, dtype=float))
        d2 = np.maximum(np.sum(w * w, 1)[:, None] + np.sum(self.gamma_set**2, 1)[None, :]
                        - 2.0 * w @ self.gamma_set.T, 0.0)
        dist = np.sqrt(d2)
        return _smooth_step((self.delta - dist) / (self.delta - self.inner))

    def weights(self, xi) -> np.ndarray:
        """``f_gamma(xi) = rho_gamma(xi/|xi|) / sum rho``; rows sum to 1."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        r = np.linalg.norm(xi, axis=1, keepdims=True)
        if np.any(r == 0):
            raise ValueError("weights are undefined at xi = 0")
        rho = self.bumps(xi / r)
        total = rho.sum(axis=1, keepdims=True)
        if np.any(total == 0):
            raise ArithmeticError("direction not covered by any bump")
        return rho / total

    def min_separation(self) -> float:
        if len(self) < 2:
            return math.inf
        return float(pdist(self.gamma_set).min())

    def covering_radius(self, samples: int = 10_000, seed: int = 0) -> float:
        """Largest distance from a random unit vector to the nearest center."""
        rng = np.random.default_rng(seed)
        if self.dim == 1:
            w = np.where(rng.random((samples, 1)) < 0.5, -1.0, 1.0)
        else:
            w = rng.normal(size=(samples, self.dim))
            w /= np.linalg.norm(w, axis=1, keepdims=True)
        return float(_backend.nearest_distance(w, self.gamma_set).max())


def cone_partition(dim: int, delta: float) -> ConePartition:
    """Greedy maximal ``delta/6``-separated set on ``S^{dim-1}`` and its partition."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    cands = sphere_candidates(dim, delta)
    # the tiny inflation keeps rounding from admitting a pair at distance < delta/6
    keep = _backend.greedy_separated(cands, delta / 6.0 * (1 + 1e-12))
    return ConePartition(cands[np.asarray(keep)], float(delta), float(delta) / 2.0)
