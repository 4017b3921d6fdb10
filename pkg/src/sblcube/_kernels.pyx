# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: fixed-width Bareiss elimination and sphere packing.

The integer routines work on 64-bit words and raise ``OverflowError`` as soon
as any intermediate product leaves that range; callers then rerun the
arbitrary-precision version from ``_kernels_py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

cdef extern from *:
    """
    static inline int sbl_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int sbl_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int sbl_mul_ovf(long long a, long long b, long long *r) nogil
    int sbl_sub_ovf(long long a, long long b, long long *r) nogil


cdef int _eliminate(long long[:, ::1] m, Py_ssize_t[::1] piv_cols, int *swaps) nogil:
    # returns rank, or -1 on overflow
    cdef Py_ssize_t n_rows = m.shape[0], n_cols = m.shape[1]
    cdef Py_ssize_t r = 0, c, p, i, j
    cdef long long prev = 1, piv, f, a, b, t
    swaps[0] = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = r
        while p < n_rows and m[p, c] == 0:
            p += 1
        if p == n_rows:
            continue
        if p != r:
            for j in range(n_cols):
                t = m[p, j]
                m[p, j] = m[r, j]
                m[r, j] = t
            swaps[0] += 1
        piv = m[r, c]
        for i in range(r + 1, n_rows):
            f = m[i, c]
            for j in range(c + 1, n_cols):
                if sbl_mul_ovf(piv, m[i, j], &a):
                    return -1
                if sbl_mul_ovf(f, m[r, j], &b):
                    return -1
                if sbl_sub_ovf(a, b, &t):
                    return -1
                # exact division, so C truncation is correct
                m[i, j] = t // prev
            m[i, c] = 0
        prev = piv
        piv_cols[r] = c
        r += 1
    return <int>r


def bareiss_echelon(rows):
    """Fraction-free row echelon form on int64; see ``_kernels_py``."""
    cdef long long[:, ::1] m
    cdef Py_ssize_t[::1] piv
    cdef int swaps = 0, rank
    n_rows = len(rows)
    if n_rows == 0:
        return 0, [], [], 0
    arr = np.array(rows, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d integer matrix")
    m = arr
    piv = np.zeros(max(arr.shape[0], 1), dtype=np.intp)
    with nogil:
        rank = _eliminate(m, piv, &swaps)
    if rank < 0:
        raise OverflowError("intermediate value exceeds 64 bits")
    return rank, [int(piv[k]) for k in range(rank)], arr.tolist(), swaps


def bareiss_det(rows):
    """Exact determinant of a square integer matrix on int64 words."""
    cdef long long[:, ::1] m
    cdef Py_ssize_t[::1] piv
    cdef int swaps = 0, rank
    cdef Py_ssize_t n = len(rows)
    if n == 0:
        return 1
    arr = np.array(rows, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ValueError("expected a square integer matrix")
    m = arr
    piv = np.zeros(n, dtype=np.intp)
    with nogil:
        rank = _eliminate(m, piv, &swaps)
    if rank < 0:
        raise OverflowError("intermediate value exceeds 64 bits")
    if rank < n:
        return 0
    d = int(m[n - 1, n - 1])
    return -d if swaps % 2 else d


def greedy_separated(candidates, double sep):
    """Indices of a greedy maximal ``sep``-separated subset, in input order."""
    cdef double[:, ::1] cand = np.ascontiguousarray(candidates, dtype=np.float64)
    cdef Py_ssize_t n = cand.shape[0], dim = cand.shape[1]
    cdef Py_ssize_t[::1] chosen = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t k = 0, i, q, a
    cdef double sep2 = sep * sep, d2, diff
    cdef bint ok
    with nogil:
        for i in range(n):
            ok = True
            for q in range(k):
                d2 = 0.0
                for a in range(dim):
                    diff = cand[i, a] - cand[chosen[q], a]
                    d2 = d2 + diff * diff
                if d2 < sep2:
                    ok = False
                    break
            if ok:
                chosen[k] = i
                k += 1
    return np.asarray(chosen[:k]).copy()


def nearest_distance(points, centers):
    """Euclidean distance from each point to its nearest center."""
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef double[:, ::1] ctr = np.ascontiguousarray(centers, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0], nc = ctr.shape[0], dim = pts.shape[1]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, q, a
    cdef double best, d2, diff
    with nogil:
        for i in range(n):
            best = 1e308
            for q in range(nc):
                d2 = 0.0
                for a in range(dim):
                    diff = pts[i, a] - ctr[q, a]
                    d2 = d2 + diff * diff
                if d2 < best:
                    best = d2
            out[i] = sqrt(best)
    return out_arr
