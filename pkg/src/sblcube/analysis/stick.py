"""Search for a stick of frequencies on which a divisor stays bounded below.

For ``eta = (0, xi'')`` with ``xi''`` in ``(R^d)^{m-l}``, the stick around a
unit direction ``gamma`` is ``1/2 <= |xi''| <= 1`` with
``|xi''/|xi''| - gamma| <= delta``. We look for ``(delta, i, k1, k2)`` with
``l < i <= m`` such that ``min(|eta_{i,k1}|, |(A^T eta)_{i,k2}|) > delta``
on a sample grid of the stick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from ..feasibility import PreconditionError, satisfies_epsilon_hypothesis
from ..linalg import RationalMatrix

DELTA_FLOOR = 1e-6


class StickSearchError(RuntimeError):
    """No stick certificate above the floor; the hypothesis on A is suspect."""


@dataclass(frozen=True)
class StickResult:
    delta: float
    i: int
    k1: int
    k2: int
    grid_min: float
    grid_density: int = 0

    def to_dict(self) -> dict:
        return {"delta": self.delta, "i": self.i, "k1": self.k1, "k2": self.k2,
                "grid_min": self.grid_min, "grid_density": self.grid_density}


def delta_schedule(start: float = 0.45, ratio: float = 2.0 / 3.0, floor: float = DELTA_FLOOR):
    """``0.45, 0.3, 0.2, ...`` down to ``floor``."""
    out = []
    delta = start
    while delta >= floor:
        out.append(delta)
        delta *= ratio
    return out


def _tangent_basis(gamma):
    n = gamma.size
    # complete gamma to an orthonormal basis; drop the gamma column
    Q, _ = np.linalg.qr(np.column_stack([gamma, np.eye(n)]))
    return Q[:, 1:n]


def _cap_offsets(k: int, theta: float, density: int, rng) -> np.ndarray:
    """Tangent offsets of length <= theta in ``R^k``: a cube grid clipped to the
    ball, plus points on the rim."""
    if k == 0:
        return np.zeros((1, 0))
    axis = np.linspace(-theta, theta, density)
    if k <= 3:
        grid = np.array(list(product(axis, repeat=k)))
    else:
        grid = rng.uniform(-theta, theta, size=(density**3, k))
    grid = grid[np.linalg.norm(grid, axis=1) <= theta * (1 + 1e-12)]
    if k == 1:
        rim = np.array([[-theta], [theta]])
    elif k == 2:
        ang = np.linspace(0, 2 * math.pi, 4 * density, endpoint=False)
        rim = theta * np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        r = rng.normal(size=(4 * density**2, k))
        rim = theta * r / np.linalg.norm(r, axis=1, keepdims=True)
    return np.vstack([grid, rim])


def stick_points(gamma, delta: float, density: int, seed: int = 0) -> np.ndarray:
    """Sample points of the stick around ``gamma`` (rows in ``R^n``)."""
    gamma = np.asarray(gamma, dtype=float).ravel()
    n = gamma.size
    theta = 2.0 * math.asin(min(delta / 2.0, 1.0))
    rng = np.random.default_rng(seed)
    offs = _cap_offsets(n - 1, theta, density, rng)
    if n == 1:
        dirs = gamma[None, :]
    else:
        T = _tangent_basis(gamma)
        ang = np.linalg.norm(offs, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(ang[:, None] > 0, offs / ang[:, None], 0.0)
        dirs = np.cos(ang)[:, None] * gamma[None, :] + np.sin(ang)[:, None] * (unit @ T.T)
    radii = np.linspace(0.5, 1.0, density)
    return (radii[:, None, None] * dirs[None, :, :]).reshape(-1, n)


def _candidate_values(A: np.ndarray, l: int, d: int, pts: np.ndarray, i: int, k1: int, k2: int):
    """``min(|eta_{i,k1}|, |(A^T eta)_{i,k2}|)`` at each sampled ``xi''``."""
    m = A.shape[0]
    blocks = pts.reshape(-1, m - l, d)
    a = blocks[:, i - l - 1, k1 - 1]
    b = blocks[:, :, k2 - 1] @ A[l:, i - 1]
    return np.minimum(np.abs(a), np.abs(b))


def stick_grid_min(A, l: int, gamma, delta: float, i: int, k1: int, k2: int,
                   density: int, chunk: int = 1 << 18) -> float:
    """Grid minimum of the stick objective for one candidate ``(i, k1, k2)``."""
    Af = A.to_numpy() if isinstance(A, RationalMatrix) else np.asarray(A, dtype=float)
    m = Af.shape[0]
    gamma = np.asarray(gamma, dtype=float).ravel()
    d = gamma.size // (m - l)
    pts = stick_points(gamma, delta, density)
    best = math.inf
    for s in range(0, len(pts), chunk):
        best = min(best, float(_candidate_values(Af, l, d, pts[s:s + chunk], i, k1, k2).min()))
    return best


def _validate(A: RationalMatrix, eps, l: int, gamma):
    m = A.rows
    if not 0 <= l < m:
        raise PreconditionError(f"need 0 <= l < m, got l={l}, m={m}")
    if not satisfies_epsilon_hypothesis(A, eps):
        raise PreconditionError(f"A does not satisfy the corner-minor hypothesis with eps={eps}")
    for r in range(l):
        if list(A.row(r)) != [-1 if c == r else 0 for c in range(m)]:
            raise PreconditionError(f"row {r + 1} of A is not row {r + 1} of -I")
    gamma = np.asarray(gamma, dtype=float).ravel()
    if gamma.size == 0 or gamma.size % (m - l):
        raise PreconditionError(f"gamma of length {gamma.size} is not in (R^d)^{m - l}")
    if abs(np.linalg.norm(gamma) - 1.0) > 1e-9:
        raise PreconditionError("gamma must be a unit vector")
    return gamma, gamma.size // (m - l)


def stick_search(A: RationalMatrix, eps, l: int, gamma, grid_density: int = 12) -> StickResult:
    """First ``(delta, i, k1, k2)`` along the schedule whose grid minimum beats ``delta``.

    Candidates are tried in lexicographic order of ``(i, k1, k2)``.
    """
    gamma, d = _validate(A, eps, l, gamma)
    Af = A.to_numpy()
    m = A.rows
    for delta in delta_schedule():
        pts = stick_points(gamma, delta, grid_density)
        for i in range(l + 1, m + 1):
            for k1 in range(1, d + 1):
                for k2 in range(1, d + 1):
                    gm = float(_candidate_values(Af, l, d, pts, i, k1, k2).min())
                    if gm > delta:
                        return StickResult(delta, i, k1, k2, gm, grid_density)
    raise StickSearchError(f"no stick certificate above delta={DELTA_FLOOR}; "
                           "A may violate the corner-minor hypothesis")


def verify_stick(A, l: int, gamma, result: StickResult, factor: int = 10) -> float:
    """Grid minimum of the certified candidate on a ``factor``-times finer grid."""
    density = max(result.grid_density, 2) * factor
    return stick_grid_min(A, l, gamma, result.delta, result.i, result.k1, result.k2, density)
