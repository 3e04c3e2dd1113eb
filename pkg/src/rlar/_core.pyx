# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics match rlar._core_py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()


def pairwise_norms(e, double scale):
    """Scaled Euclidean distances between the rows of e (m x r)."""
    cdef double[:, ::1] ev = np.ascontiguousarray(e, dtype=np.float64)
    cdef Py_ssize_t m = ev.shape[0], r = ev.shape[1]
    out_arr = np.zeros((m, m))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    for i in range(m):
        for j in range(i + 1, m):
            acc = 0.0
            for k in range(r):
                diff = ev[i, k] - ev[j, k]
                acc += diff * diff
            acc = sqrt(acc) * scale
            out[i, j] = acc
            out[j, i] = acc
    return out_arr


def knn_binary(g, long k):
    """Binary row-wise k-nearest selection with ascending-index tie-break."""
    cdef double[:, ::1] gv = np.ascontiguousarray(g, dtype=np.float64)
    cdef Py_ssize_t m = gv.shape[0]
    v_arr = np.zeros((m, m))
    cdef double[:, ::1] v = v_arr
    if k <= 0:
        return v_arr
    cdef double[::1] work = np.empty(m)
    cdef Py_ssize_t i, j, s, best
    cdef double best_val
    for i in range(m):
        for j in range(m):
            work[j] = gv[i, j]
        work[i] = INFINITY
        for s in range(k):
            best = -1
            best_val = INFINITY
            for j in range(m):
                if work[j] < best_val:  # strict: first minimum wins ties
                    best_val = work[j]
                    best = j
            v[i, best] = 1.0
            work[best] = INFINITY
    return v_arr


def retarget_rows(y, labels0):
    """Margin-constrained target update for every row of y (n x c)."""
    y_arr = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[:, ::1] yv = y_arr
    cdef long long[::1] lab = np.ascontiguousarray(labels0, dtype=np.int64)
    cdef Py_ssize_t n = yv.shape[0], c = yv.shape[1]
    t_arr = np.empty((n, c))
    delta_arr = np.empty(n)
    cdef double[:, ::1] t = t_arr
    cdef double[::1] delta = delta_arr
    cdef double[::1] vs = np.empty(c - 1)
    cdef Py_ssize_t i, j, p, q, nv, rho
    cdef long long l
    cdef double ylab, vj, cum, d
    for i in range(n):
        l = lab[i]
        ylab = yv[i, l]
        # violation margins for the non-label columns, insertion-sorted descending
        nv = 0
        for j in range(c):
            if j == l:
                continue
            vj = yv[i, j] + 1.0 - ylab
            p = nv
            while p > 0 and vs[p - 1] < vj:
                vs[p] = vs[p - 1]
                p -= 1
            vs[p] = vj
            nv += 1
        cum = 0.0
        rho = 0
        for p in range(nv):
            cum += vs[p]
            if vs[p] > cum / (2.0 + p):
                rho = p + 1
            else:
                break
        if rho > 0:
            cum = 0.0
            for p in range(rho):
                cum += vs[p]
            d = cum / (1.0 + rho)
        else:
            d = 0.0
        delta[i] = d
        for j in range(c):
            if j == l:
                t[i, j] = ylab + d
            else:
                vj = yv[i, j] + 1.0 - ylab
                if d - vj < 0.0:
                    t[i, j] = yv[i, j] + (d - vj)
                else:
                    t[i, j] = yv[i, j]
    return t_arr, delta_arr
