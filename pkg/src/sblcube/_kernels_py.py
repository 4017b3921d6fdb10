"""Pure-Python implementations of the hot kernels.

Used when the compiled ``sblcube._kernels`` extension is unavailable, and as
the overflow fallback for its fixed-width integer routines.
"""

import numpy as np


def bareiss_echelon(rows):
    """Fraction-free row echelon form of an integer matrix.

    Parameters
    ----------
    rows : list of list of int
        Row-major integer matrix; not modified.

    Returns
    -------
    rank : int
    pivots : list of int
        Pivot column of each of the first ``rank`` rows.
    echelon : list of list of int
        The eliminated matrix. Entry ``[r][c]`` with ``c`` a pivot column is a
        leading minor, and every division performed is exact.
    swaps : int
        Number of row interchanges.
    """
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    prev = 1
    r = 0
    swaps = 0
    pivots = []
    for c in range(n_cols):
        if r == n_rows:
            break
        p = r
        while p < n_rows and m[p][c] == 0:
            p += 1
        if p == n_rows:
            continue
        if p != r:
            m[p], m[r] = m[r], m[p]
            swaps += 1
        piv = m[r][c]
        row_r = m[r]
        for i in range(r + 1, n_rows):
            row_i = m[i]
            f = row_i[c]
            for j in range(c + 1, n_cols):
                row_i[j] = (piv * row_i[j] - f * row_r[j]) // prev
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return r, pivots, m, swaps


def bareiss_det(rows):
    """Exact determinant of a square integer matrix by Bareiss elimination."""
    n = len(rows)
    if n == 0:
        return 1
    rank, _, m, swaps = bareiss_echelon(rows)
    if rank < n:
        return 0
    d = m[n - 1][n - 1]
    return -d if swaps % 2 else d


def greedy_separated(candidates, sep):
    """Indices of a greedy maximal ``sep``-separated subset, in input order."""
    cand = np.ascontiguousarray(candidates, dtype=np.float64)
    sep2 = float(sep) ** 2
    chosen = np.empty_like(cand)
    idx = []
    k = 0
    for i in range(cand.shape[0]):
        if k:
            diff = chosen[:k] - cand[i]
            if np.min(np.einsum("ij,ij->i", diff, diff)) < sep2:
                continue
        chosen[k] = cand[i]
        k += 1
        idx.append(i)
    return np.asarray(idx, dtype=np.intp)


def nearest_distance(points, centers, chunk=4096):
    """Euclidean distance from each point to its nearest center."""
    pts = np.asarray(points, dtype=np.float64)
    ctr = np.asarray(centers, dtype=np.float64)
    out = np.empty(pts.shape[0])
    c2 = np.einsum("ij,ij->i", ctr, ctr)
    for s in range(0, pts.shape[0], chunk):
        block = pts[s:s + chunk]
        d2 = np.einsum("ij,ij->i", block, block)[:, None] + c2[None, :] - 2.0 * block @ ctr.T
        out[s:s + chunk] = np.sqrt(np.maximum(d2.min(axis=1), 0.0))
    return out
