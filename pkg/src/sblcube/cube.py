"""Corners of the cube Q = {0,1}^m and the selection maps attached to them.

Coordinates of ``x`` in ``(R^d)^{2m}`` are ordered
``(x_1^0, ..., x_m^0, x_1^1, ..., x_m^1)``, each block of length ``d``, so
coordinate ``k`` of ``x_i^b`` (all 0-based) sits at ``(b*m + i)*d + k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping

from .gaussian import GaussianMixture
from .linalg import RationalMatrix, ShapeError, to_rational


@dataclass(frozen=True, order=True)
class CubeIndex:
    """A corner ``j: {1..m} -> {0,1}``; ``j(i)`` reads bit ``i`` (1-based)."""

    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"cube index bits must be 0/1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "CubeIndex":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"malformed cube index {text!r}")
        return cls(tuple(int(c) for c in text))

    @property
    def m(self) -> int:
        return len(self.bits)

    def __call__(self, i: int) -> int:
        if not 1 <= i <= self.m:
            raise IndexError(f"axis {i} outside 1..{self.m}")
        return self.bits[i - 1]

    def __str__(self):
        return "".join(map(str, self.bits))

    def __repr__(self):
        return f"CubeIndex('{self}')"

    def weight(self) -> int:
        return sum(self.bits)


def corners(m: int) -> Iterator[CubeIndex]:
    """All ``2^m`` corners in lexicographic bit order."""
    for bits in product((0, 1), repeat=m):
        yield CubeIndex(bits)


def reflect(i: int, j: CubeIndex) -> CubeIndex:
    """Flip bit ``i`` (1-based) of ``j``."""
    if not 1 <= i <= j.m:
        raise IndexError(f"axis {i} outside 1..{j.m}")
    bits = list(j.bits)
    bits[i - 1] = 1 - bits[i - 1]
    return CubeIndex(tuple(bits))


def opposite(j: CubeIndex) -> CubeIndex:
    return CubeIndex(tuple(1 - b for b in j.bits))


def corner_projection(m: int, d: int, j: CubeIndex) -> RationalMatrix:
    """The ``dm x 2dm`` selection matrix ``x -> (x_1^{j(1)}, ..., x_m^{j(m)})``."""
    if j.m != m:
        raise ShapeError(f"cube index {j} has length {j.m}, expected m={m}")
    n = 2 * m * d
    entries = []
    for i in range(m):
        for k in range(d):
            col = (j.bits[i] * m + i) * d + k
            entries.extend(1 if c == col else 0 for c in range(n))
    return RationalMatrix(m * d, n, entries)


def corner_block(B: RationalMatrix, A: RationalMatrix, j: CubeIndex) -> RationalMatrix:
    """``(B A) Pi_j^T`` in block form: column ``i`` of B if ``j(i)=0``, else of A."""
    m = B.rows
    cols = [B.col(i) if j.bits[i] == 0 else A.col(i) for i in range(m)]
    return RationalMatrix.from_rows(cols).T


def block_double(D: RationalMatrix) -> RationalMatrix:
    """``diag(D, D)`` acting on ``(x^0, x^1)``."""
    Z = RationalMatrix.zeros(D.rows, D.cols)
    return D.hstack(Z).vstack(Z.hstack(D))


def default_exponents(m: int) -> dict:
    return {j: Fraction(2 ** m) for j in corners(m)}


@dataclass(frozen=True)
class CubicalData:
    """An instance ``Pi = (B A)`` acting on ``(R^d)^{2m}`` with corner exponents."""

    m: int
    d: int
    A: RationalMatrix
    B: RationalMatrix | None = None
    exponents: Mapping = field(default=None)

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise ValueError("m and d must be >= 1")
        if self.A.shape != (self.m, self.m):
            raise ShapeError(f"A must be {self.m}x{self.m}, got {self.A.rows}x{self.A.cols}")
        B = self.B if self.B is not None else RationalMatrix.identity(self.m)
        if B.shape != (self.m, self.m):
            raise ShapeError(f"B must be {self.m}x{self.m}, got {B.rows}x{B.cols}")
        object.__setattr__(self, "B", B)
        exps = default_exponents(self.m)
        if self.exponents is not None:
            for k, v in self.exponents.items():
                key = CubeIndex.parse(k) if isinstance(k, str) else k
                if key not in exps:
                    raise ShapeError(f"exponent key {key} is not a corner of the {self.m}-cube")
                exps[key] = to_rational(v)
        object.__setattr__(self, "exponents", exps)

    @property
    def Pi_block(self) -> RationalMatrix:
        """``(B A)`` as an ``m x 2m`` matrix (block sense)."""
        return self.B.hstack(self.A)

    @property
    def Pi(self) -> RationalMatrix:
        """``(B A) ⊗ I_d`` as a ``dm x 2dm`` matrix."""
        return self.Pi_block.kron_identity(self.d)

    def exponent_sum(self) -> Fraction:
        return sum((1 / p for p in self.exponents.values()), Fraction(0))


@dataclass
class FunctionAssignment:
    """Functions ``F_j`` indexed by corners (or by integers for general data).

    ``symmetry_level = l`` records that ``F_j == F_{i*j}`` for all ``i <= l``;
    this is checked on construction.
    """

    functions: dict
    symmetry_level: int = 0

    def __post_init__(self):
        keys = list(self.functions)
        if self.symmetry_level and not all(isinstance(k, CubeIndex) for k in keys):
            raise ValueError("reflection symmetry needs corner-indexed functions")
        if self.symmetry_level < 0:
            raise ValueError("symmetry_level must be >= 0")
        if keys and isinstance(keys[0], CubeIndex):
            m = keys[0].m
            if self.symmetry_level > m:
                raise ValueError(f"symmetry_level {self.symmetry_level} exceeds m={m}")
            for j in keys:
                for i in range(1, self.symmetry_level + 1):
                    if self.functions[j] != self.functions[reflect(i, j)]:
                        raise ValueError(f"F_{j} differs from F_{reflect(i, j)} "
                                         f"but symmetry level is {self.symmetry_level}")

    def __getitem__(self, j):
        return self.functions[j]

    def __iter__(self):
        return iter(sorted(self.functions))

    def __len__(self):
        return len(self.functions)

    def items(self):
        return [(k, self.functions[k]) for k in sorted(self.functions)]

    @classmethod
    def uniform(cls, m: int, F) -> "FunctionAssignment":
        """Every corner gets ``F``; symmetric under all reflections."""
        return cls({j: F for j in corners(m)}, symmetry_level=m)

    @classmethod
    def symmetrized(cls, m: int, level: int, pick) -> "FunctionAssignment":
        """``F_j = pick(j')`` where ``j'`` zeroes the first ``level`` bits of ``j``."""
        funcs, reps = {}, {}
        for j in corners(m):
            rep = CubeIndex((0,) * level + j.bits[level:])
            if rep not in reps:
                reps[rep] = pick(rep)
            funcs[j] = reps[rep]
        return cls(funcs, symmetry_level=level)

    def is_gaussian(self) -> bool:
        return all(isinstance(F, GaussianMixture) for F in self.functions.values())
