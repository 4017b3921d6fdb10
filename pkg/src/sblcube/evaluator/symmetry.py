"""Diagonal rescalings and axis permutations that leave the form unchanged.

For diagonal ``D`` of rank ``m`` (acting blockwise):

* ``F~_j(y) = |det D|^{d/p_j} F_j(D y)``, ``K~(y) = |det D|^d K(D y)``,
  ``A~ = D^{-1} A D``.

For a permutation with ``(P y)_i = y_{P(i)}``:

* ``F~_j(y) = F_{j o P}(P y)``, ``K~(y) = K(P y)``, ``A~ = P^T A P``.

Both give ``Lambda(K~, A~, F~) = Lambda(K, A, F)`` when ``sum 1/p_j = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..analysis.kernels import Dirac, HeatDifference, MixtureKernel
from ..cube import CubeIndex, CubicalData, FunctionAssignment
from ..feasibility import PreconditionError, normalize_to_IA
from ..linalg import RationalMatrix, det, inverse
from .forms import FormResult, RouteError, eval_form, kernel_mixture


@dataclass
class SymmetryResult:
    data: CubicalData
    tuple: FunctionAssignment
    kernel: object
    before: FormResult
    after: FormResult

    @property
    def rel_error(self) -> float:
        a, b = self.before.value, self.after.value
        scale = max(abs(a), abs(b))
        return 0.0 if scale == 0 else abs(a - b) / scale

    def to_dict(self) -> dict:
        return {"A": str(self.data.A), "before": self.before.value, "after": self.after.value,
                "rel_error": self.rel_error}


def permutation_matrix(perm) -> RationalMatrix:
    """Matrix of ``(P y)_i = y_{perm[i]}`` (``perm`` 0-based)."""
    m = len(perm)
    if sorted(perm) != list(range(m)):
        raise PreconditionError(f"{perm!r} is not a permutation of 0..{m - 1}")
    return RationalMatrix(m, m, [1 if perm[i] == c else 0 for i in range(m) for c in range(m)])


def _transform_kernel(K, L: np.ndarray, factor: float, dim: int):
    """``y -> factor * K(L y)`` for invertible ``L``."""
    if isinstance(K, Dirac):
        # factor |det D|^d exactly cancels the Jacobian of delta(D y)
        return K
    if isinstance(K, HeatDifference) and factor == 1.0 and np.array_equal(L @ L.T, np.eye(dim)):
        return K  # radial kernel under an orthogonal relabeling
    if isinstance(K, (HeatDifference, MixtureKernel)):
        return MixtureKernel(kernel_mixture(K, dim).compose_linear(L).scaled(factor))
    raise RouteError(f"symmetry transform of {type(K).__name__} is not implemented")


def scale_transform(data: CubicalData, tup: FunctionAssignment, K, D: RationalMatrix):
    """Transformed ``(data, tuple, kernel)`` under a diagonal rescaling."""
    m, d = data.m, data.d
    if D.shape != (m, m) or any(D[i, j] != 0 for i in range(m) for j in range(m) if i != j):
        raise PreconditionError("D must be an m x m diagonal matrix")
    detD = det(D)
    if detD == 0:
        raise PreconditionError("D is singular")
    A = normalize_to_IA(data)
    A_t = inverse(D) @ A @ D
    Dd = np.kron(D.to_numpy(), np.eye(d))
    adet = abs(float(detD))
    funcs = {j: F.compose_linear(Dd).scaled(adet ** (d / float(data.exponents[j])))
             for j, F in tup.items()}
    K_t = _transform_kernel(K, Dd, adet**d, m * d)
    return CubicalData(m, d, A_t, exponents=data.exponents), FunctionAssignment(funcs), K_t


def permute_transform(data: CubicalData, tup: FunctionAssignment, K, perm):
    """Transformed ``(data, tuple, kernel)`` under ``(P y)_i = y_{perm[i]}``."""
    m, d = data.m, data.d
    if len(perm) != m:
        raise PreconditionError(f"permutation of length {len(perm)} for m={m}")
    P = permutation_matrix(perm)
    A = normalize_to_IA(data)
    A_t = P.T @ A @ P
    Pd = np.kron(P.to_numpy(), np.eye(d))
    funcs = {}
    for j in tup:
        # (j o P)(i) = j(P(i)); the new j' = j o P^{-1}, so F~_{j'} uses F_j
        jP = CubeIndex(tuple(j.bits[perm[i]] for i in range(m)))
        funcs[j] = tup[jP].compose_linear(Pd)
    exps = {j: data.exponents[CubeIndex(tuple(j.bits[perm[i]] for i in range(m)))] for j in data.exponents}
    K_t = _transform_kernel(K, Pd, 1.0, m * d)
    return CubicalData(m, d, A_t, exponents=exps), FunctionAssignment(funcs), K_t


def apply_symmetry(kind: str, data: CubicalData, tup: FunctionAssignment, K, *, D=None,
                   perm=None) -> SymmetryResult:
    """Apply ``scale`` (needs ``D``) or ``permute`` (needs ``perm``) and evaluate both sides."""
    if data.exponent_sum() != 1:
        raise PreconditionError(f"sum of 1/p_j is {data.exponent_sum()}, not 1")
    if kind == "scale":
        if D is None:
            raise PreconditionError("scale symmetry needs D")
        new = scale_transform(data, tup, K, D)
    elif kind == "permute":
        if perm is None:
            raise PreconditionError("permutation symmetry needs perm")
        new = permute_transform(data, tup, K, perm)
    else:
        raise ValueError(f"unknown symmetry kind {kind!r}")
    before = eval_form(K, normalize_to_IA(data), tup)
    after = eval_form(new[2], new[0].A, new[1])
    return SymmetryResult(new[0], new[1], new[2], before, after)
