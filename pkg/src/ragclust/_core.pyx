# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for geometric triangle counting and kernel sampling.

Every floating-point expression here matches ``_fallback.py`` term for term;
the two backends must return identical integers.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()

NAME = "cython"


cdef inline double _mod1(double a) noexcept nogil:
    cdef double r = a - floor(a)
    if r >= 1.0:
        r -= 1.0
    return r


cdef inline Py_ssize_t _upper(const double[::1] s, Py_ssize_t n, double v) noexcept nogil:
    # first index with s[i] > v
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if s[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _lower(const double[::1] s, Py_ssize_t n, double v) noexcept nogil:
    # first index with s[i] >= v
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if s[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline int _in_open(double p, double a, double length) noexcept nogil:
    cdef double b = a + length
    if b > 1.0:
        return (p > a) or (p < b - 1.0)
    return (a < p) and (p < b)


cdef inline Py_ssize_t _piece(Py_ssize_t n, double x, double y, double a, double e,
                              Py_ssize_t up, Py_ssize_t lo) noexcept nogil:
    # piece lengths are <= 1/2: e far behind a is a wrap, slightly behind is empty
    cdef Py_ssize_t cnt
    if e > a:
        cnt = lo - up
        cnt -= (a < x) and (x < e)
        cnt -= (a < y) and (y < e)
    elif (a - e) >= 0.5:
        cnt = n - up + lo
        cnt -= (x > a) or (x < e)
        cnt -= (y > a) or (y < e)
    else:
        cnt = 0
    return cnt


def count_sorted(s_in, double r1, double r2):
    """Degrees (in sorted order) and the sum over edges of common-neighbor counts."""
    cdef const double[::1] s = np.ascontiguousarray(s_in, dtype=np.float64)
    cdef Py_ssize_t n = s.shape[0]
    cdef double length = r1 - r2
    deg_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] deg = deg_arr
    # per node and per arc (0: positive side, 1: negative side): start, end, ranks
    a_arr = np.empty((2, n), dtype=np.float64)
    e_arr = np.empty((2, n), dtype=np.float64)
    up_arr = np.empty((2, n), dtype=np.intp)
    lo_arr = np.empty((2, n), dtype=np.intp)
    cdef double[:, ::1] A = a_arr
    cdef double[:, ::1] E = e_arr
    cdef Py_ssize_t[:, ::1] UP = up_arr
    cdef Py_ssize_t[:, ::1] LO = lo_arr
    cdef Py_ssize_t i, j, t, c_pos, c_neg, ka, kb
    cdef double x, y, b, tt, a1, a2
    cdef long long common = 0
    with nogil:
        for i in range(n):
            x = s[i]
            A[0, i] = _mod1(x + r2)
            A[1, i] = _mod1(x - r1)
            for ka in range(2):
                b = A[ka, i] + length
                E[ka, i] = b - 1.0 if b > 1.0 else b
                UP[ka, i] = _upper(s, n, A[ka, i])
                LO[ka, i] = _lower(s, n, E[ka, i])
        for i in range(n):
            x = s[i]
            if E[0, i] > A[0, i]:
                c_pos = LO[0, i] - UP[0, i]
            else:
                c_pos = n - UP[0, i] + LO[0, i]
            if E[1, i] > A[1, i]:
                c_neg = LO[1, i] - UP[1, i]
            else:
                c_neg = n - UP[1, i] + LO[1, i]
            deg[i] = (c_pos + c_neg
                      - _in_open(x, A[0, i], length) - _in_open(x, A[1, i], length))
            for t in range(c_pos):
                j = (UP[0, i] + t) % n
                if j == i:
                    continue
                y = s[j]
                for ka in range(2):
                    a1 = A[ka, i]
                    for kb in range(2):
                        a2 = A[kb, j]
                        tt = _mod1(a2 - a1)
                        if tt < length:
                            common += _piece(n, x, y, a2, E[ka, i], UP[kb, j], LO[ka, i])
                        if tt + length - 1.0 > 0.0:
                            common += _piece(n, x, y, a1, E[kb, j], UP[ka, i], LO[kb, j])
    return deg_arr, int(common)


cdef inline int _edge(double a, double b, double r1, double r2) noexcept nogil:
    cdef double gap = fabs(a - b)
    cdef double d = 1.0 - gap
    if gap < d:
        d = gap
    return (d > r2) and (d < r1)


def kernel_category_counts(u_in, double r1, double r2):
    """3x3 table of kernel categories for quadruples stored as rows of ``u``."""
    cdef const double[:, ::1] u = np.ascontiguousarray(u_in, dtype=np.float64)
    cdef Py_ssize_t m = u.shape[1], k
    out_arr = np.zeros((3, 3), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef int e12, k3, k4
    with nogil:
        for k in range(m):
            e12 = _edge(u[0, k], u[1, k], r1, r2)
            k3 = e12 + _edge(u[0, k], u[2, k], r1, r2) + _edge(u[1, k], u[2, k], r1, r2)
            k4 = e12 + _edge(u[0, k], u[3, k], r1, r2) + _edge(u[1, k], u[3, k], r1, r2)
            k3 = 0 if k3 < 2 else k3 - 1
            k4 = 0 if k4 < 2 else k4 - 1
            out[k3, k4] += 1
    return out_arr
