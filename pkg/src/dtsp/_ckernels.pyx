# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_pykernels``; keep the arithmetic in the same order."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, log, log1p, expm1, floor

cnp.import_array()

cdef int NAIVE_OFFSET_MAX = 8
cdef double NAIVE_SHAPE_MIN = 0.25


cdef inline double _powdiff(long c, double n) nogil:
    if c == 0:
        return 1.0
    if c <= NAIVE_OFFSET_MAX and n >= NAIVE_SHAPE_MIN:
        return pow(c + 1.0, n) - pow(<double>c, n)
    return pow(<double>c, n) * expm1(n * log1p(1.0 / c))


cdef inline double _log_powdiff(long c, double n) nogil:
    if c == 0:
        return 0.0
    if c <= NAIVE_OFFSET_MAX and n >= NAIVE_SHAPE_MIN:
        return log(pow(c + 1.0, n) - pow(<double>c, n))
    return n * log(<double>c) + log(expm1(n * log1p(1.0 / c)))


cdef inline double _dlog_powdiff(long c, double n) nogil:
    cdef double g
    if c == 0:
        return 0.0
    g = log1p(1.0 / c)
    return log(<double>c) + g / -expm1(-n * g)


def powdiff(long c, double n):
    return _powdiff(c, n)


def log_powdiff(long c, double n):
    return _log_powdiff(c, n)


def dlog_powdiff(long c, double n):
    return _dlog_powdiff(c, n)


def loglik_terms(offsets, weights, double n):
    cdef const cnp.int64_t[:] c = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const double[:] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t i, k = c.shape[0]
    cdef double lp = 0.0, dl = 0.0
    if w.shape[0] != k:
        raise ValueError("offsets and weights differ in length")
    with nogil:
        for i in range(k):
            if c[i] > 0:
                lp += w[i] * _log_powdiff(c[i], n)
                dl += w[i] * _dlog_powdiff(c[i], n)
    return lp, dl


def floor_quantile(us, a, m, b, double n):
    cdef const double[:] u = np.ascontiguousarray(us, dtype=np.float64)
    cdef double fa = a, fm = m, fb = b
    cdef double inv = 1.0 / n
    cdef double thresh = (fm - fa) / (fb - fa)
    cdef Py_ssize_t i, k = u.shape[0]
    cdef double x, y
    out = np.empty(k, dtype=np.int64)
    cdef cnp.int64_t[:] o = out
    with nogil:
        for i in range(k):
            if fm > fa and u[i] <= thresh:
                x = fa + (fm - fa) * pow(u[i] * (fb - fa) / (fm - fa), inv)
            elif fm < fb:
                x = fb - (fb - fm) * pow((1.0 - u[i]) * (fb - fa) / (fb - fm), inv)
            else:
                x = fb
            y = floor(x)
            if y > fb - 1.0:
                y = fb - 1.0
            if y < fa:
                y = fa
            o[i] = <cnp.int64_t>y
    return out
