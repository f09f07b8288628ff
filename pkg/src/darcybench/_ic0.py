"""Numba kernels for incomplete Cholesky and sparse triangular solves.

The CSR input must have sorted column indices and an explicit diagonal, so
the diagonal is the last stored entry of each row of the lower triangle.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def ic0_factor(n, indptr, indices, data):
    """In-place IC(0) of the lower triangle (LL^T, no fill).

    Returns 0 on success, or 1-based row index of a nonpositive pivot so the
    caller can fall back to a diagonal preconditioner.
    """
    for i in range(n):
        s, e = indptr[i], indptr[i + 1]
        for p in range(s, e):
            j = indices[p]
            acc = data[p]
            pi, pj = s, indptr[j]
            ei, ej = e, indptr[j + 1]
            while pi < ei and pj < ej:
                ci, cj = indices[pi], indices[pj]
                if ci >= j or cj >= j:
                    break
                if ci == cj:
                    acc -= data[pi] * data[pj]
                    pi += 1
                    pj += 1
                elif ci < cj:
                    pi += 1
                else:
                    pj += 1
            if j == i:
                if acc <= 0.0:
                    return i + 1
                data[p] = np.sqrt(acc)
            else:
                data[p] = acc / data[indptr[j + 1] - 1]
    return 0


@njit(cache=True)
def lower_solve(n, indptr, indices, data, b, x):
    """x <- L^{-1} b for CSR lower-triangular L with diagonal last per row."""
    for i in range(n):
        acc = b[i]
        s, e = indptr[i], indptr[i + 1]
        for p in range(s, e - 1):
            acc -= data[p] * x[indices[p]]
        x[i] = acc / data[e - 1]


@njit(cache=True)
def lower_transpose_solve(n, indptr, indices, data, x):
    """x <- L^{-T} x in place (column sweep over the stored lower triangle)."""
    for i in range(n - 1, -1, -1):
        s, e = indptr[i], indptr[i + 1]
        x[i] /= data[e - 1]
        xi = x[i]
        for p in range(s, e - 1):
            x[indices[p]] -= data[p] * xi
