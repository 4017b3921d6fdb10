"""Exact feasibility decisions for cubical data ``Pi = (B A)``.

Two independent routes decide the same question:

* the dimension route: compute ``ker Pi`` and check that every corner
  projection is injective on it (the BCCT inequality at ``V = ker Pi``);
* the determinant route: check that every ``Pi Pi_j^T`` is regular.

They must agree; :func:`check_conditions` raises if they do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .cube import (CubeIndex, CubicalData, FunctionAssignment, corner_block,
                   corner_projection, corners)
from .gaussian import GaussianMixture
from .linalg import (RationalMatrix, ShapeError, SingularMatrixError, column_matrix,
                     det, hs_norm_sq, inverse, kernel_basis, rank, to_rational)


class PreconditionError(ValueError):
    """Inputs violate an operation's stated hypothesis."""


class SingularBError(PreconditionError):
    """``B`` is singular, so condition (1) already fails at ``V = ker Pi``."""

    def __init__(self, kernel_vector):
        self.kernel_vector = tuple(kernel_vector)
        super().__init__("B is singular; kernel vector " + " ".join(map(str, self.kernel_vector)))


class EquivalenceViolation(AssertionError):
    """The dimension and determinant routes disagreed."""


@dataclass
class FeasibilityReport:
    m: int
    d: int
    corner_dets: dict          # CubeIndex -> Fraction, det(Pi Pi_j^T) in block form
    condition2: bool
    condition1: bool
    kernel_ranks: dict         # CubeIndex -> rank of Pi_j restricted to ker Pi
    kernel_dim: int
    bcct_gap_at_kernel: Fraction
    epsilon_star: float
    bcct_equality_at_kernel: bool
    witness_corner: CubeIndex | None = None

    @property
    def feasible(self) -> bool:
        return self.condition1 and self.condition2

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "feasible": self.feasible,
            "condition1": self.condition1,
            "condition2": self.condition2,
            "corner_dets": {str(j): str(v) for j, v in sorted(self.corner_dets.items())},
            "kernel_dim": self.kernel_dim,
            "kernel_ranks": {str(j): v for j, v in sorted(self.kernel_ranks.items())},
            "bcct_gap_at_kernel": str(self.bcct_gap_at_kernel),
            "bcct_equality_at_kernel": self.bcct_equality_at_kernel,
            "epsilon_star": self.epsilon_star,
            "witness_corner": None if self.witness_corner is None else str(self.witness_corner),
        }


def normalize_to_IA(data: CubicalData) -> RationalMatrix:
    """``B^{-1} A``, so that ``(I B^{-1}A)`` has the same regular corners as ``(B A)``."""
    try:
        Binv = inverse(data.B)
    except SingularMatrixError:
        raise SingularBError(kernel_basis(data.B)[0]) from None
    return Binv @ data.A


def corner_determinants(B: RationalMatrix, A: RationalMatrix) -> dict:
    return {j: det(corner_block(B, A, j)) for j in corners(A.rows)}


def _check_surjective(data: CubicalData):
    if rank(data.Pi_block) < data.m:
        raise PreconditionError(f"Pi = (B A) is not surjective (rank {rank(data.Pi_block)} < {data.m})")


def check_conditions(data: CubicalData) -> FeasibilityReport:
    """Decide both conditions of the equivalence independently and compare."""
    _check_surjective(data)
    m, d = data.m, data.d

    # determinant route, block size m
    dets = corner_determinants(data.B, data.A)
    condition2 = all(v != 0 for v in dets.values())

    # dimension route on the materialized dm x 2dm map
    ker = kernel_basis(data.Pi)
    N = column_matrix(ker, 2 * m * d)
    kdim = len(ker)
    kranks = {j: rank(corner_projection(m, d, j) @ N) for j in corners(m)}
    weight = Fraction(1, 2**m)
    gap = kdim - sum((weight * r for r in kranks.values()), Fraction(0))
    equality = gap == 0
    condition1 = equality and all(r == kdim for r in kranks.values())

    if condition1 != condition2:
        raise EquivalenceViolation(
            f"condition (1) = {condition1} but condition (2) = {condition2} for A = {data.A}, B = {data.B}")

    witness = None
    if not condition2:
        # most degenerate corner, ties broken lexicographically
        witness = min(corners(m), key=lambda j: (rank(corner_block(data.B, data.A, j)), j.bits))

    if condition2:
        eps = epsilon_star(normalize_to_IA(data))
    else:
        eps = 0.0
    return FeasibilityReport(m, d, dets, condition2, condition1, kranks, kdim, gap, eps, equality, witness)


def epsilon_star(A: RationalMatrix) -> float:
    """``min(min_j |det((I A) Pi_j^T)|, 1/||A||_HS)``; 0 if a corner is singular."""
    m = A.rows
    dets = corner_determinants(RationalMatrix.identity(m), A)
    dmin = min(abs(v) for v in dets.values())
    if dmin == 0:
        return 0.0
    hs2 = hs_norm_sq(A)
    hs_branch = math.inf if hs2 == 0 else 1.0 / math.sqrt(hs2)
    return min(float(dmin), hs_branch)


def satisfies_epsilon_hypothesis(A: RationalMatrix, eps) -> bool:
    """Exact test of ``|det((I A)Pi_j^T)| > eps`` for all ``j`` and ``||A||_HS <= 1/eps``."""
    e = to_rational(eps)
    if e <= 0:
        return False
    dets = corner_determinants(RationalMatrix.identity(A.rows), A)
    if any(v * v <= e * e for v in dets.values()):
        return False
    return hs_norm_sq(A) * e * e <= 1


def _span_rank(vectors: Sequence, length: int) -> int:
    return rank(column_matrix(vectors, length)) if vectors else 0


def bcct_gap(Pi: RationalMatrix, V_basis: Sequence, projections: Sequence[RationalMatrix],
             exponents: Sequence) -> Fraction:
    """``dim V - sum_i (1/p_i) dim(Pi_i V)`` for ``V`` inside ``ker Pi``, exact."""
    n = Pi.cols
    V = [tuple(to_rational(x) for x in v) for v in V_basis]
    for v in V:
        if len(v) != n:
            raise ShapeError(f"basis vector of length {len(v)} in a {n}-dimensional space")
        if any(x != 0 for x in Pi @ v):
            raise PreconditionError("V is not contained in ker Pi")
    if len(projections) != len(exponents):
        raise ShapeError("need one exponent per projection")
    dimV = _span_rank(V, n)
    total = Fraction(0)
    for P, p in zip(projections, exponents):
        if not V:
            break
        total += Fraction(1) / to_rational(p) * rank(P @ column_matrix(V, n))
    return dimV - total


def cubical_projections(data: CubicalData) -> dict:
    return {j: corner_projection(data.m, data.d, j) for j in corners(data.m)}


def cubical_gap(data: CubicalData, V_basis: Sequence | None = None) -> Fraction:
    """BCCT gap of the cubical data at ``V`` (default ``ker Pi``)."""
    V = kernel_basis(data.Pi) if V_basis is None else V_basis
    projs = cubical_projections(data)
    keys = sorted(projs)
    return bcct_gap(data.Pi, V, [projs[j] for j in keys], [data.exponents[j] for j in keys])


def coordinate_subspace_gaps(data: CubicalData, max_dim: int = 6) -> dict:
    """Gaps at every span of a nonempty subset of the ``ker Pi`` basis.

    Keys are tuples of basis positions. Limited to kernels of dimension
    ``<= max_dim`` since the count is ``2^dim - 1``.
    """
    ker = kernel_basis(data.Pi)
    if len(ker) > max_dim:
        raise ValueError(f"kernel dimension {len(ker)} exceeds max_dim={max_dim}")
    out = {}
    for r in range(1, len(ker) + 1):
        for sub in combinations(range(len(ker)), r):
            out[sub] = cubical_gap(data, [ker[i] for i in sub])
    return out


@dataclass
class SchurCertificate:
    block: tuple              # 1-based indices of the leading block after permutation
    det_X11: Fraction
    det_schur: Fraction       # det(A12 A22^{-1} A21 - A11)
    identity_holds: bool      # A12 A22^{-1} A21 X11 - A11 X11 == -I


@dataclass
class InverseBounds:
    hs_bound: Fraction                  # m * eps^{-m}
    hs_norm_sq_inverse: Fraction
    holds: bool
    schur_certificates: list = field(default_factory=list)


def inverse_bounds(A: RationalMatrix, eps) -> InverseBounds:
    """Cramer bound ``||A^{-1}||_HS <= m eps^{-m}`` and the block identities behind
    lower bounds on principal minors of ``A^{-1}``, all checked exactly."""
    e = to_rational(eps)
    if not satisfies_epsilon_hypothesis(A, e):
        raise PreconditionError(f"A does not satisfy the corner/HS hypothesis with eps = {eps}")
    m = A.rows
    X = inverse(A)
    bound = m / e**m
    hs2 = hs_norm_sq(X)
    certs = []
    idx = list(range(m))
    for r in range(1, m + 1):
        for S in combinations(idx, r):
            T = [i for i in idx if i not in S]
            A11 = A.submatrix(S, S)
            X11 = X.submatrix(S, S)
            if T:
                A12, A21, A22 = A.submatrix(S, T), A.submatrix(T, S), A.submatrix(T, T)
                schur = A12 @ inverse(A22) @ A21 - A11
            else:
                schur = -A11
            ident = schur @ X11 == -RationalMatrix.identity(r)
            certs.append(SchurCertificate(tuple(i + 1 for i in S), det(X11), det(schur), ident))
    return InverseBounds(bound, hs2, hs2 <= bound * bound, certs)


class TrilinearCase(str, Enum):
    TRIVIAL = "trivial"
    GENERIC_BHT = "generic-bht"
    HYBRID = "hybrid"
    TWISTED_PARAPRODUCT = "twisted-paraproduct"
    DEGENERATE_TRIANGULAR = "degenerate-triangular-family"
    OTHER = "other"


def classify_trilinear(A3: RationalMatrix, degenerate_columns: bool = False) -> TrilinearCase:
    """Label the normalized three-function case from the eigenvalues of ``A3``.

    Membership of 0 and 1 in the spectrum is read off the characteristic
    polynomial ``p(x) = x^2 - tr x + det`` at 0 and 1, exactly.
    """
    if A3.shape != (2, 2):
        raise ShapeError("A3 must be 2x2")
    if degenerate_columns:
        return TrilinearCase.DEGENERATE_TRIANGULAR
    if A3.is_zero() or A3 == RationalMatrix.identity(2):
        return TrilinearCase.TRIVIAL
    tr = A3[0, 0] + A3[1, 1]
    dt = det(A3)
    zero_root = dt == 0
    one_root = 1 - tr + dt == 0
    if zero_root and one_root:
        return TrilinearCase.TWISTED_PARAPRODUCT
    if zero_root:
        other = tr            # roots 0 and tr
    elif one_root:
        other = tr - 1        # roots 1 and tr - 1
    else:
        return TrilinearCase.GENERIC_BHT
    return TrilinearCase.HYBRID if other not in (0, 1) else TrilinearCase.OTHER


def has_vanishing_first_columns(*mats: RationalMatrix) -> bool:
    return all(M[0, 0] == 0 and M[1, 0] == 0 for M in mats)


def triangular_family() -> tuple:
    """``(A1, A2, A3)`` of the unresolved case: zero first columns, second columns
    ``(0,0), (0,1), (1,0)``."""
    return (RationalMatrix.parse("0 0; 0 0"), RationalMatrix.parse("0 0; 0 1"),
            RationalMatrix.parse("0 1; 0 0"))


def _orthonormal_basis(vectors: Sequence, n: int) -> np.ndarray:
    if not vectors:
        return np.zeros((n, 0))
    M = np.array([[float(x) for x in v] for v in vectors]).T
    r = _span_rank(vectors, n)
    U, _, _ = np.linalg.svd(M, full_matrices=False)
    return U[:, :r]


def bcct_witness(Pi: RationalMatrix, V_basis: Sequence, R: float,
                 projections: Mapping | Sequence) -> FunctionAssignment:
    """Gaussian stand-ins for the characteristic-function witnesses.

    ``F_i`` has width ``R`` along ``Pi_i V`` and width 1 across it, so the
    integrand stays large on an ``R``-ball of ``V``.
    """
    for v in V_basis:
        if any(x != 0 for x in Pi @ tuple(to_rational(t) for t in v)):
            raise PreconditionError("V is not contained in ker Pi")
    if R <= 0:
        raise ValueError("scale R must be positive")
    items = projections.items() if isinstance(projections, Mapping) else enumerate(projections)
    funcs = {}
    for key, P in items:
        images = [P @ tuple(v) for v in V_basis]
        U = _orthonormal_basis(images, P.rows)
        M = np.eye(P.rows) - (1.0 - 1.0 / R**2) * (U @ U.T)
        funcs[key] = GaussianMixture([(1.0, np.zeros(P.rows), M)])
    return FunctionAssignment(funcs)
