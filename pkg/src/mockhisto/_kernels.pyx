# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for Chebyshev evaluation, segment means and LU.

Every function here has a twin with the same signature in ``_fallback``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef enum:
    BLOCK = 256
    SUB = 64


def chebval(double[::1] x, double[::1] coeffs):
    """Clenshaw evaluation of sum coeffs[k] T_k(x) at every point of ``x``.

    Points are processed in blocks with the point index innermost, so the
    recurrence for independent points pipelines instead of stalling on the
    serial dependency of a single point.
    """
    cdef Py_ssize_t npts = x.shape[0]
    cdef Py_ssize_t deg = coeffs.shape[0] - 1
    cdef Py_ssize_t start, stop, i, j, k
    cdef double c
    cdef double two_t[BLOCK]
    cdef double b1[BLOCK]
    cdef double b2[BLOCK]
    cdef double b0
    out = np.empty(npts, dtype=np.float64)
    cdef double[::1] res = out
    for start in range(0, npts, BLOCK):
        stop = min(start + BLOCK, npts)
        for j in range(stop - start):
            two_t[j] = 2.0 * x[start + j]
            b1[j] = 0.0
            b2[j] = 0.0
        for k in range(deg, 0, -1):
            c = coeffs[k]
            for j in range(stop - start):
                b0 = c + two_t[j] * b1[j] - b2[j]
                b2[j] = b1[j]
                b1[j] = b0
        for j in range(stop - start):
            res[start + j] = coeffs[0] + x[start + j] * b1[j] - b2[j]
    return out


def cheb_vander(double[::1] x, Py_ssize_t degree):
    """Matrix V[i, k] = T_k(x[i]) for k = 0..degree by the three-term recurrence."""
    cdef Py_ssize_t npts = x.shape[0]
    cdef Py_ssize_t i, k
    cdef double t
    out = np.empty((npts, degree + 1), dtype=np.float64)
    cdef double[:, ::1] v = out
    for i in range(npts):
        t = x[i]
        v[i, 0] = 1.0
        if degree >= 1:
            v[i, 1] = t
        for k in range(2, degree + 1):
            v[i, k] = 2.0 * t * v[i, k - 1] - v[i, k - 2]
    return out


def segment_means(double[::1] a, double[::1] b, Py_ssize_t degree):
    """Matrix M[i, k] = mean of T_k over [a[i], b[i]] from exact antiderivatives."""
    cdef Py_ssize_t nseg = a.shape[0]
    cdef Py_ssize_t i, k
    cdef double lo, hi, h
    out = np.empty((nseg, degree + 1), dtype=np.float64)
    cdef double[:, ::1] m = out
    ta_arr = np.empty(degree + 2, dtype=np.float64)
    tb_arr = np.empty(degree + 2, dtype=np.float64)
    cdef double[::1] ta = ta_arr
    cdef double[::1] tb = tb_arr
    for i in range(nseg):
        lo = a[i]
        hi = b[i]
        h = hi - lo
        ta[0] = 1.0
        tb[0] = 1.0
        ta[1] = lo
        tb[1] = hi
        for k in range(2, degree + 2):
            ta[k] = 2.0 * lo * ta[k - 1] - ta[k - 2]
            tb[k] = 2.0 * hi * tb[k - 1] - tb[k - 2]
        m[i, 0] = 1.0
        if degree >= 1:
            m[i, 1] = 0.5 * (lo + hi)
        for k in range(2, degree + 1):
            m[i, k] = 0.5 * ((tb[k + 1] - ta[k + 1]) / (k + 1)
                             - (tb[k - 1] - ta[k - 1]) / (k - 1)) / h
    return out


def abs_row_sums(double[::1] x, double[:, ::1] coeffs):
    """Return s[i] = sum_j |p_j(x[i])| where row j of ``coeffs`` holds p_j.

    For each small block of points the values T_k(x) are tabulated once
    (k-major, cache resident), then four polynomials at a time are
    accumulated across the block.
    """
    cdef Py_ssize_t npts = x.shape[0]
    cdef Py_ssize_t npoly = coeffs.shape[0]
    cdef Py_ssize_t deg = coeffs.shape[1] - 1
    cdef Py_ssize_t start, nb, j, p, k
    cdef double c0, c1, c2, c3, t
    cdef double a0[SUB]
    cdef double a1[SUB]
    cdef double a2[SUB]
    cdef double a3[SUB]
    cdef double tot[SUB]
    tk_arr = np.empty((deg + 1, SUB), dtype=np.float64)
    cdef double[:, ::1] tk = tk_arr
    out = np.empty(npts, dtype=np.float64)
    cdef double[::1] res = out
    for start in range(0, npts, SUB):
        nb = min(SUB, npts - start)
        for j in range(nb):
            tk[0, j] = 1.0
            tot[j] = 0.0
        if deg >= 1:
            for j in range(nb):
                tk[1, j] = x[start + j]
        for k in range(2, deg + 1):
            for j in range(nb):
                tk[k, j] = 2.0 * tk[1, j] * tk[k - 1, j] - tk[k - 2, j]
        p = 0
        while p + 4 <= npoly:
            for j in range(nb):
                a0[j] = 0.0
                a1[j] = 0.0
                a2[j] = 0.0
                a3[j] = 0.0
            for k in range(deg + 1):
                c0 = coeffs[p, k]
                c1 = coeffs[p + 1, k]
                c2 = coeffs[p + 2, k]
                c3 = coeffs[p + 3, k]
                for j in range(nb):
                    t = tk[k, j]
                    a0[j] += c0 * t
                    a1[j] += c1 * t
                    a2[j] += c2 * t
                    a3[j] += c3 * t
            for j in range(nb):
                tot[j] += fabs(a0[j]) + fabs(a1[j]) + fabs(a2[j]) + fabs(a3[j])
            p += 4
        while p < npoly:
            for j in range(nb):
                a0[j] = 0.0
            for k in range(deg + 1):
                c0 = coeffs[p, k]
                for j in range(nb):
                    a0[j] += c0 * tk[k, j]
            for j in range(nb):
                tot[j] += fabs(a0[j])
            p += 1
        for j in range(nb):
            res[start + j] = tot[j]
    return out


def lu_factor(double[:, ::1] A, double pivot_tol):
    """In-place style LU with row partial pivoting on a copy of ``A``.

    Returns ``(lu, perm, bad)`` where ``bad`` is the first column whose pivot
    magnitude fell to ``pivot_tol`` or below, or -1.
    """
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t i, j, k, p
    cdef double amax, v, piv, f
    lu_arr = np.array(A, dtype=np.float64, copy=True, order="C")
    perm_arr = np.arange(n, dtype=np.intp)
    cdef double[:, ::1] lu = lu_arr
    cdef Py_ssize_t[::1] perm = perm_arr
    for k in range(n):
        p = k
        amax = fabs(lu[k, k])
        for i in range(k + 1, n):
            v = fabs(lu[i, k])
            if v > amax:
                amax = v
                p = i
        if amax <= pivot_tol:
            return lu_arr, perm_arr, k
        if p != k:
            for j in range(n):
                v = lu[k, j]
                lu[k, j] = lu[p, j]
                lu[p, j] = v
            i = perm[k]
            perm[k] = perm[p]
            perm[p] = i
        piv = lu[k, k]
        for i in range(k + 1, n):
            f = lu[i, k] / piv
            lu[i, k] = f
            if f != 0.0:
                for j in range(k + 1, n):
                    lu[i, j] -= f * lu[k, j]
    return lu_arr, perm_arr, -1


def lu_solve(double[:, ::1] lu, Py_ssize_t[::1] perm, double[::1] rhs):
    """Forward/back substitution for a factorization from ``lu_factor``."""
    cdef Py_ssize_t n = lu.shape[0]
    cdef Py_ssize_t i, j
    cdef double s
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] x = out
    for i in range(n):
        s = rhs[perm[i]]
        for j in range(i):
            s -= lu[i, j] * x[j]
        x[i] = s
    for i in range(n - 1, -1, -1):
        s = x[i]
        for j in range(i + 1, n):
            s -= lu[i, j] * x[j]
        x[i] = s / lu[i, i]
    return out
