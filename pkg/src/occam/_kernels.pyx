# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. See ``_kernels_py.py`` for the reference versions."""
import numpy as np

from libc.math cimport log, sqrt

BACKEND = "cython"

cdef double LOG_2PI = 1.8378770664093453


cdef int _cholesky(double[:, ::1] a, double[:, ::1] lower, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double s
    for j in range(m):
        s = a[j, j]
        for k in range(j):
            s -= lower[j, k] * lower[j, k]
        if s <= 0.0:
            return -1
        lower[j, j] = sqrt(s)
        for i in range(j + 1, m):
            s = a[i, j]
            for k in range(j):
                s -= lower[i, k] * lower[j, k]
            lower[i, j] = s / lower[j, j]
    return 0


def prefix_log_evidences(phi, ts, double sigma, double sigma_w):
    cdef double[:, ::1] p = np.ascontiguousarray(phi, dtype=np.float64)
    cdef double[::1] t = np.ascontiguousarray(ts, dtype=np.float64)
    cdef Py_ssize_t n_rows = p.shape[0], m = p.shape[1]
    cdef double[:, ::1] a = np.eye(m) / (sigma_w * sigma_w)
    cdef double[:, ::1] lower = np.zeros((m, m))
    cdef double[::1] b = np.zeros(m)
    cdef double[::1] z = np.zeros(m)
    out_arr = np.empty(n_rows + 1)
    cdef double[::1] out = out_arr
    cdef double s2 = sigma * sigma
    cdef double log_s2 = log(s2)
    cdef double const_w = -m * log(sigma_w)
    cdef double tt = 0.0, ti, zz, logdet, s
    cdef Py_ssize_t i, j, k
    cdef int rc = 0
    out[0] = 0.0
    with nogil:
        for i in range(n_rows):
            ti = t[i]
            for j in range(m):
                for k in range(j + 1):
                    a[j, k] += p[i, j] * p[i, k] / s2
                b[j] += p[i, j] * (ti / s2)
            tt += ti * ti
            rc = _cholesky(a, lower, m)
            if rc != 0:
                break
            zz = 0.0
            logdet = 0.0
            for j in range(m):
                s = b[j]
                for k in range(j):
                    s -= lower[j, k] * z[k]
                z[j] = s / lower[j, j]
                zz += z[j] * z[j]
                logdet += log(lower[j, j])
            out[i + 1] = (-0.5 * (i + 1) * (LOG_2PI + log_s2) + const_w
                          - 0.5 * (tt / s2 - zz) - logdet)
    if rc != 0:
        raise RuntimeError("precision matrix is not positive definite")
    return out_arr


def coin_log_odds_path(bits, double prior_log_odds):
    cdef signed char[::1] bv = np.ascontiguousarray(bits, dtype=np.int8)
    cdef Py_ssize_t i, size = bv.shape[0]
    out_arr = np.empty(size)
    cdef double[::1] out = out_arr
    cdef double lo = prior_log_odds
    cdef long n = 0, k = 0
    with nogil:
        for i in range(size):
            if bv[i] == 0:
                lo += log(<double>(n + 2) / <double>(2 * k + 2))
                k += 1
            else:
                lo += log(<double>(n + 2) / <double>(2 * (n + 1 - k)))
            n += 1
            out[i] = lo
    return out_arr
