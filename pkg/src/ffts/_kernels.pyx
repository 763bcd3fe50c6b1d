# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``ffts._kernels_py``.

Same signatures and semantics; the O(n^2) kernel density sum and the
weighted least-squares iteration run without Python overhead.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, fabs, INFINITY

cnp.import_array()

DEF DAMP_AFTER = 50


cdef void _pearson(const double[::1] r, double sigma, double s, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = r.shape[0], i, j
    cdef double g2 = s * sigma * sigma
    cdef double inv2g2 = 0.5 / g2
    cdef double tot = sigma * sigma + g2
    cdef double acc, d, k, lr
    # symmetric kernel sum: each pair once, diagonal contributes exp(0) = 1
    for i in range(n):
        out[i] = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            d = r[i] - r[j]
            k = exp(-d * d * inv2g2)
            out[i] += k
            out[j] += k
    for i in range(n):
        acc = out[i] / n / sqrt(g2)
        lr = log(acc) + 0.5 * r[i] * r[i] / tot + 0.5 * log(tot)
        if lr > 709.0:
            out[i] = INFINITY
        else:
            out[i] = exp(lr) - 1.0


cdef inline double _hellinger(double delta) noexcept nogil:
    cdef double d1 = delta + 1.0
    cdef double u, inv, w
    if d1 <= 0.0:
        return 0.0
    if d1 == INFINITY:
        return 0.0
    u = sqrt(d1)
    inv = 1.0 / u
    w = 2.0 * inv - inv * inv
    if w < 0.0:
        return 0.0
    if w > 1.0:
        return 1.0
    return w


def pearson_residuals(resid, double sigma, double s):
    cdef double[::1] r = np.ascontiguousarray(resid, dtype=np.float64)
    out = np.empty(r.shape[0])
    cdef double[::1] o = out
    with nogil:
        _pearson(r, sigma, s, o)
    return out


def hellinger_weights(delta):
    cdef double[::1] d = np.ascontiguousarray(np.ravel(delta), dtype=np.float64)
    out = np.empty(d.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    for i in range(d.shape[0]):
        o[i] = _hellinger(d[i])
    return out.reshape(np.shape(delta))


cdef void _row_weights(const double[::1] w, int p, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = w.shape[0], i, j
    for i in range(n):
        out[i] = w[i]
        for j in range(1, p + 1):
            if i - j >= 0:
                out[i] *= w[i - j]


def row_weights(w, int p):
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    out = np.empty(wv.shape[0])
    cdef double[::1] o = out
    _row_weights(wv, p, o)
    return out


cdef int _solve(double[:, ::1] A, double[::1] b, int q) noexcept nogil:
    """Gaussian elimination with partial pivoting; solution left in ``b``."""
    cdef int i, j, k, piv
    cdef double m, tmp, amax
    for k in range(q):
        piv = k
        amax = fabs(A[k, k])
        for i in range(k + 1, q):
            if fabs(A[i, k]) > amax:
                amax = fabs(A[i, k])
                piv = i
        if amax < 1e-300:
            return 1
        if piv != k:
            for j in range(q):
                tmp = A[k, j]; A[k, j] = A[piv, j]; A[piv, j] = tmp
            tmp = b[k]; b[k] = b[piv]; b[piv] = tmp
        for i in range(k + 1, q):
            m = A[i, k] / A[k, k]
            for j in range(k, q):
                A[i, j] -= m * A[k, j]
            b[i] -= m * b[k]
    for k in range(q - 1, -1, -1):
        tmp = b[k]
        for j in range(k + 1, q):
            tmp -= A[k, j] * b[j]
        b[k] = tmp / A[k, k]
    return 0


def wle_iterate(y_in, X_in, coef0, double sigma0, double s, int max_iter, double tol,
                bint unit_weights, int p):
    cdef double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef double[:, ::1] X = np.ascontiguousarray(X_in, dtype=np.float64).reshape(y.shape[0], -1)
    cdef Py_ssize_t n = y.shape[0], q = X.shape[1], i, a, c
    coef_arr = np.array(coef0, dtype=np.float64).reshape(q)
    cdef double[::1] coef = coef_arr
    cdef double[::1] new_coef = np.empty(q)
    cdef double[::1] resid = np.empty(n)
    cdef double[::1] delta = np.empty(n)
    w_arr = np.ones(n)
    cdef double[::1] w = w_arr
    cdef double[::1] rw = np.empty(n)
    cdef double[:, ::1] A = np.empty((q, q))
    cdef double sigma = sigma0, new_sigma, wsum, wmax, change, acc, val
    cdef int it = 0, converged = 0, failed = 0

    with nogil:
        for it in range(1, max_iter + 1):
            for i in range(n):
                acc = y[i]
                for a in range(q):
                    acc -= X[i, a] * coef[a]
                resid[i] = acc
            if unit_weights:
                for i in range(n):
                    w[i] = 1.0
            else:
                _pearson(resid, sigma, s, delta)
                for i in range(n):
                    w[i] = _hellinger(delta[i])
            wmax = 0.0
            for i in range(n):
                if w[i] > wmax:
                    wmax = w[i]
            if wmax < 1e-6:
                failed = 1
                break
            _row_weights(w, p, rw)
            wsum = 0.0
            for i in range(n):
                wsum += rw[i]
            if wsum < 1e-6:
                failed = 1
                break
            if q > 0:
                for a in range(q):
                    acc = 0.0
                    for i in range(n):
                        acc += rw[i] * X[i, a] * y[i]
                    new_coef[a] = acc
                    for c in range(q):
                        acc = 0.0
                        for i in range(n):
                            acc += rw[i] * X[i, a] * X[i, c]
                        A[a, c] = acc
                if _solve(A, new_coef, q):
                    failed = 1
                    break
            acc = 0.0
            for i in range(n):
                val = y[i]
                for a in range(q):
                    val -= X[i, a] * new_coef[a]
                acc += rw[i] * val * val
            new_sigma = sqrt(acc / wsum) if acc > 0 else 0.0
            if it > DAMP_AFTER:
                for a in range(q):
                    new_coef[a] = 0.5 * (coef[a] + new_coef[a])
                new_sigma = 0.5 * (sigma + new_sigma)
            change = fabs(new_sigma - sigma)
            for a in range(q):
                if fabs(new_coef[a] - coef[a]) > change:
                    change = fabs(new_coef[a] - coef[a])
                coef[a] = new_coef[a]
            sigma = new_sigma
            if sigma <= 0.0:
                break
            if change < tol:
                converged = 1
                break

    if failed:
        return coef_arr, sigma, w_arr, it, False
    for i in range(n):
        acc = y[i]
        for a in range(q):
            acc -= X[i, a] * coef[a]
        resid[i] = acc
    if unit_weights or sigma <= 0.0:
        for i in range(n):
            w[i] = 1.0
    else:
        _pearson(resid, sigma, s, delta)
        for i in range(n):
            w[i] = _hellinger(delta[i])
    return coef_arr, sigma, w_arr, it, bool(converged)
