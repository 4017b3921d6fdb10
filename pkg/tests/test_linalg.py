from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sblcube.linalg import (RationalMatrix, ShapeError, SingularMatrixError, block_apply, det,
                            hs_norm_sq, inverse, kernel_basis, rank, to_rational)

fractions = st.fractions(min_value=-6, max_value=6, max_denominator=5)


def square(n):
    return st.lists(fractions, min_size=n * n, max_size=n * n).map(lambda e: RationalMatrix(n, n, e))


def leibniz_det(M):
    n = M.rows
    total = Fraction(0)
    for p in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if p[i] > p[j]:
                    sign = -sign
        term = Fraction(sign)
        for i in range(n):
            term *= M[i, p[i]]
        total += term
    return total


def test_parse_and_str_round_trip():
    M = RationalMatrix.parse("1 -3/4; 0.5 2")
    assert M[0, 1] == Fraction(-3, 4)
    assert M[1, 0] == Fraction(1, 2)
    assert RationalMatrix.parse(str(M)) == M


@pytest.mark.parametrize("bad", ["", "1 2; 3", "1 x; 0 1", "1/0 1; 1 1", "1 2;;3 4"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        RationalMatrix.parse(bad)


def test_to_rational_is_exact_for_floats():
    assert to_rational(0.1) == Fraction(0.1)
    assert to_rational("7/3") == Fraction(7, 3)
    with pytest.raises(TypeError):
        to_rational(object())


def test_det_known_values():
    assert det(RationalMatrix.parse("1 2; 3 4")) == -2
    assert det(RationalMatrix.parse("1/2 1/3; 1/4 1/5")) == Fraction(1, 10) - Fraction(1, 12)
    assert det(RationalMatrix.identity(5)) == 1
    assert det(RationalMatrix.zeros(3, 3)) == 0


def test_det_huge_entries_fall_back_to_bigints():
    big = 10**30
    M = RationalMatrix.parse(f"{big} 1; 1 {big}")
    assert det(M) == big * big - 1


@given(square(3))
def test_det_matches_leibniz(M):
    assert det(M) == leibniz_det(M)


@given(square(3), square(3))
def test_det_multiplicative(M, N):
    assert det(M @ N) == det(M) * det(N)


@given(square(3))
def test_inverse_exact(M):
    if det(M) == 0:
        with pytest.raises(SingularMatrixError):
            inverse(M)
    else:
        assert M @ inverse(M) == RationalMatrix.identity(3)


@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_rank_nullity_and_kernel(rows, cols, data):
    M = RationalMatrix(rows, cols, data.draw(st.lists(fractions, min_size=rows * cols, max_size=rows * cols)))
    ker = kernel_basis(M)
    assert rank(M) + len(ker) == cols
    for v in ker:
        assert all(x == 0 for x in M @ v)


def test_rank_agrees_with_numpy_on_integer_matrices(rng):
    for _ in range(50):
        A = rng.integers(-3, 4, size=(4, 5))
        A[3] = A[0] + A[1]
        M = RationalMatrix(4, 5, A.ravel().tolist())
        assert rank(M) == np.linalg.matrix_rank(A)


def test_kron_identity_and_block_apply():
    A = RationalMatrix.parse("1 2; 3 4")
    K = A.kron_identity(2)
    assert K.shape == (4, 4)
    y = (1, 5, 2, 7)
    assert K @ y == block_apply(A, y, 2)
    with pytest.raises(ShapeError):
        block_apply(A, (1, 2, 3), 2)


def test_hs_norm_sq():
    assert hs_norm_sq(RationalMatrix.parse("1 -2; 1/2 0")) == Fraction(21, 4)


def test_shape_errors():
    with pytest.raises(ShapeError):
        det(RationalMatrix.zeros(2, 3))
    with pytest.raises(ShapeError):
        RationalMatrix.identity(2) @ RationalMatrix.identity(3)
    with pytest.raises(AttributeError):
        RationalMatrix.identity(2).rows = 3
