# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: batched rank-aggregation scores and tau pair counts.

Matches the semantics of `pure.py`; keep both in sync.
"""

from libc.math cimport INFINITY, exp, lgamma, log, log1p
from libc.stdlib cimport free, malloc

import numpy as np


def rho_many(ranks):
    """Per-row minimum binomial-tail score of normalized ranks in (0, 1]."""
    cdef double[:, ::1] R = np.ascontiguousarray(ranks, dtype=np.float64)
    cdef Py_ssize_t n_rows = R.shape[0]
    cdef Py_ssize_t m = R.shape[1]
    out_arr = np.empty(n_rows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double* buf = <double*> malloc(m * sizeof(double))
    cdef double* logc = <double*> malloc((m + 1) * sizeof(double))
    cdef double* terms = <double*> malloc((m + 1) * sizeof(double))
    if buf == NULL or logc == NULL or terms == NULL:
        free(buf)
        free(logc)
        free(terms)
        raise MemoryError()

    cdef Py_ssize_t b, i, j, k, l, n_terms
    cdef double key, r, lr, l1r, t, mx, s, beta, rho
    cdef double lgm = lgamma(m + 1.0)
    for l in range(m + 1):
        logc[l] = lgm - lgamma(l + 1.0) - lgamma(m - l + 1.0)

    with nogil:
        for b in range(n_rows):
            for i in range(m):
                key = R[b, i]
                j = i - 1
                while j >= 0 and buf[j] > key:
                    buf[j + 1] = buf[j]
                    j -= 1
                buf[j + 1] = key
            rho = 2.0
            for k in range(1, m + 1):
                r = buf[k - 1]
                if r >= 1.0:
                    beta = 1.0
                else:
                    lr = log(r)
                    l1r = log1p(-r)
                    mx = -INFINITY
                    n_terms = 0
                    for l in range(k, m + 1):
                        t = logc[l] + l * lr + (m - l) * l1r
                        terms[n_terms] = t
                        n_terms += 1
                        if t > mx:
                            mx = t
                    s = 0.0
                    for l in range(n_terms):
                        s += exp(terms[l] - mx)
                    beta = exp(mx) * s
                    if beta > 1.0:
                        beta = 1.0
                if beta < rho:
                    rho = beta
            out[b] = rho

    free(buf)
    free(logc)
    free(terms)
    return out_arr


def tau_counts(x, y):
    """Concordant/discordant and per-side tied pair counts over all i < j."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    if yv.shape[0] != n:
        raise ValueError("length mismatch")
    cdef long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0
    cdef Py_ssize_t i, j
    cdef double dx, dy
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                dx = xv[i] - xv[j]
                dy = yv[i] - yv[j]
                if dx == 0:
                    ties_x += 1
                if dy == 0:
                    ties_y += 1
                if dx != 0 and dy != 0:
                    if (dx > 0) == (dy > 0):
                        concordant += 1
                    else:
                        discordant += 1
    return int(concordant), int(discordant), int(ties_x), int(ties_y)
