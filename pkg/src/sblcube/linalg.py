"""Exact rational matrices.

Scalars are :class:`fractions.Fraction`. Determinants and ranks go through
fraction-free (Bareiss) elimination on row-scaled integer copies, so no
intermediate rational ever needs reducing.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from . import _backend

Rational = Fraction
RationalVector = tuple  # tuple[Fraction, ...]


class ShapeError(ValueError):
    """Matrix dimensions do not fit the requested operation."""


class SingularMatrixError(ArithmeticError):
    """Raised when inverting a matrix whose determinant is zero."""

    def __init__(self, msg="matrix is singular (det = 0)"):
        super().__init__(msg)


def to_rational(x) -> Fraction:
    """Coerce ints, Fractions, floats (exactly) and strings like ``"-3/4"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational literal {x!r}") from exc
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    raise TypeError(f"cannot interpret {x!r} as a rational")


class RationalMatrix:
    """Immutable dense matrix of Fractions, stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        ent = tuple(to_rational(e) for e in entries)
        if len(ent) != rows * cols:
            raise ShapeError(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(ent)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", ent)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    # construction -----------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, 0, ())
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ShapeError("ragged rows")
        return cls(len(rows), n, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def diag(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def parse(cls, text: str) -> "RationalMatrix":
        """Parse ``"a b; c d"``; entries may be ``p/q`` or decimals."""
        text = text.strip()
        if not text:
            raise ValueError("empty matrix literal")
        rows = [r.replace(",", " ").split() for r in text.split(";")]
        if any(not r for r in rows):
            raise ValueError(f"empty row in matrix literal {text!r}")
        return cls.from_rows([[to_rational(e) for e in r] for r in rows])

    # access -----------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols] if self.cols else ()

    def tolist(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows,
                              [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(len(rows), len(cols), [self[i, j] for i in rows for j in cols])

    def to_numpy(self) -> np.ndarray:
        return np.array([float(e) for e in self.entries], dtype=float).reshape(self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    # arithmetic -------------------------------------------------------------

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
            ocols = [other.col(j) for j in range(other.cols)]
            return RationalMatrix(self.rows, other.cols, [
                sum((a * b for a, b in zip(self.row(i), c)), Fraction(0))
                for i in range(self.rows) for c in ocols])
        vec = tuple(to_rational(v) for v in other)
        if len(vec) != self.cols:
            raise ShapeError(f"cannot apply {self.shape} matrix to vector of length {len(vec)}")
        return tuple(sum((a * b for a, b in zip(self.row(i), vec)), Fraction(0))
                     for i in range(self.rows))

    def _check_same(self, other):
        if not isinstance(other, RationalMatrix) or other.shape != self.shape:
            raise ShapeError("operands must be matrices of equal shape")

    def __add__(self, other):
        self._check_same(other)
        return RationalMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_same(other)
        return RationalMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return RationalMatrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "RationalMatrix":
        c = to_rational(c)
        return RationalMatrix(self.rows, self.cols, [c * a for a in self.entries])

    def __eq__(self, other):
        return (isinstance(other, RationalMatrix) and self.shape == other.shape
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"RationalMatrix.parse({str(self)!r})"

    def __str__(self):
        return "; ".join(" ".join(str(e) for e in self.row(i)) for i in range(self.rows))

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows != other.rows:
            raise ShapeError("hstack needs equal row counts")
        return RationalMatrix.from_rows([self.row(i) + other.row(i) for i in range(self.rows)])

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.cols:
            raise ShapeError("vstack needs equal column counts")
        return RationalMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def kron_identity(self, d: int) -> "RationalMatrix":
        """``self ⊗ I_d``: each entry becomes a ``d x d`` scalar block."""
        if d == 1:
            return self
        out = []
        for i in range(self.rows):
            for a in range(d):
                for j in range(self.cols):
                    e = self[i, j]
                    out.extend(e if b == a else Fraction(0) for b in range(d))
        return RationalMatrix(self.rows * d, self.cols * d, out)


def _integer_rows(M: RationalMatrix):
    """Rows scaled by the lcm of their denominators; returns (rows, scales)."""
    rows, scales = [], []
    for i in range(M.rows):
        r = M.row(i)
        s = lcm(*(e.denominator for e in r)) if r else 1
        rows.append([int(e * s) for e in r])
        scales.append(s)
    return rows, scales


def det(M: RationalMatrix) -> Fraction:
    """Exact determinant via fraction-free elimination."""
    if not M.is_square:
        raise ShapeError(f"determinant of non-square {M.rows}x{M.cols} matrix")
    if M.rows == 0:
        return Fraction(1)
    rows, scales = _integer_rows(M)
    num = _backend.bareiss_det(rows)
    den = 1
    for s in scales:
        den *= s
    return Fraction(num, den)


def echelon(M: RationalMatrix):
    """``(rank, pivot_columns, integer_echelon_rows)`` of ``M``."""
    if M.rows == 0 or M.cols == 0:
        return 0, [], []
    rows, _ = _integer_rows(M)
    rank, pivots, E, _ = _backend.bareiss_echelon(rows)
    return rank, pivots, E


def rank(M: RationalMatrix) -> int:
    return echelon(M)[0]


def kernel_basis(M: RationalMatrix) -> list:
    """Exact null-space basis in reduced-echelon parametrization.

    One vector per free column, in increasing column order; the vector for
    free column ``f`` has a 1 at ``f`` and 0 at every other free column.
    """
    n = M.cols
    r, pivots, E = echelon(M)
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for k in range(r - 1, -1, -1):
            p = pivots[k]
            row = E[k]
            s = sum((row[c] * v[c] for c in range(p + 1, n) if row[c]), Fraction(0))
            v[p] = -s / row[p]
        basis.append(tuple(v))
    return basis


def column_matrix(vectors: Sequence[Sequence], length: int | None = None) -> RationalMatrix:
    """Matrix whose columns are the given vectors (``length x 0`` if empty)."""
    vecs = [tuple(to_rational(x) for x in v) for v in vectors]
    if not vecs:
        return RationalMatrix(length or 0, 0, ())
    return RationalMatrix.from_rows(vecs).T


def inverse(M: RationalMatrix) -> RationalMatrix:
    """Exact inverse by Gauss-Jordan elimination over the rationals."""
    if not M.is_square:
        raise ShapeError(f"inverse of non-square {M.rows}x{M.cols} matrix")
    n = M.rows
    aug = [list(M.row(i)) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise SingularMatrixError()
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [e / piv for e in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return RationalMatrix(n, n, [e for row in aug for e in row[n:]])


def hs_norm_sq(M: RationalMatrix) -> Fraction:
    """Squared Hilbert-Schmidt (Frobenius) norm, exact."""
    return sum((e * e for e in M.entries), Fraction(0))


def block_apply(A: RationalMatrix, y: Sequence, d: int) -> tuple:
    """Blockwise action ``(Ay)_i = sum_j a_ij y_j`` on ``y`` in ``(Q^d)^m``."""
    m = A.cols
    y = [to_rational(v) for v in y]
    if len(y) != m * d:
        raise ShapeError(f"vector of length {len(y)} is not in (Q^{d})^{m}")
    out = []
    for i in range(A.rows):
        for k in range(d):
            out.append(sum((A[i, j] * y[j * d + k] for j in range(m)), Fraction(0)))
    return tuple(out)


def format_vector(v: Sequence) -> str:
    return " ".join(str(to_rational(e)) for e in v)


def parse_vector(text: str) -> tuple:
    return tuple(to_rational(e) for e in text.replace(",", " ").split())
