# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: the O(N^2) circulant quadrature used by the
``direct`` nonlocal backend and the O(J^2) quadratic mode coupling of the
spectral coefficient system.  A pure-numpy twin lives in ``_kernels_py``."""

import numpy as np


def circulant_apply(double[::1] row, double[::1] rho, double ds):
    """out[k] = ds * sum_l row[(k - l) mod N] * rho[l]."""
    cdef Py_ssize_t n = row.shape[0]
    cdef Py_ssize_t k, l, idx
    cdef double acc
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    for k in range(n):
        acc = 0.0
        for l in range(n):
            idx = k - l
            if idx < 0:
                idx += n
            acc += row[idx] * rho[l]
        out[k] = acc * ds
    return out_arr


def quadratic_coupling(double complex[::1] beta, double[::1] lam):
    """out[j] = sum_l lam[l] * beta[j - l] * beta[l] over the stored band.

    Arrays are indexed 0..2J with mode number j = index - J; products whose
    ``j - l`` falls outside the band are dropped (projection truncation).
    """
    cdef Py_ssize_t m = beta.shape[0]
    cdef Py_ssize_t bigj = (m - 1) // 2
    cdef Py_ssize_t j, l, d
    cdef double complex acc
    out_arr = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    for j in range(m):
        acc = 0
        for l in range(m):
            d = j - (l - bigj)
            if 0 <= d < m:
                acc += lam[l] * beta[d] * beta[l]
        out[j] = acc
    return out_arr
