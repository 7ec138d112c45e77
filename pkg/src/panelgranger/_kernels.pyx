# cython: language_level=3
"""Compiled hot loops.

Signatures and return values mirror ``_fallback`` exactly; ``_backend``
picks one of the two at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, copysign, exp, log, log1p, lgamma

cnp.import_array()

cdef double DBL_EPS = 2.220446049250313e-16
cdef double FPMIN = 1e-300


cdef bint _householder(double[:, ::1] A, double[::1] y, double[::1] v,
                       double[::1] colnorm, Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    """In-place QR of A[:n, :k]; applies Q^T to y. Returns False on rank loss."""
    cdef Py_ssize_t i, j, c
    cdef double norm, alpha, vnorm2, w, scale, tol, big = 0.0
    cdef bint ok = True
    for j in range(k):
        norm = 0.0
        for i in range(n):
            norm += A[i, j] * A[i, j]
        colnorm[j] = sqrt(norm)
        if colnorm[j] > big:
            big = colnorm[j]
    tol = n * DBL_EPS * big
    for j in range(k):
        norm = 0.0
        for i in range(j, n):
            norm += A[i, j] * A[i, j]
        norm = sqrt(norm)
        if norm <= tol:
            ok = False
            A[j, j] = 0.0
            continue
        alpha = -copysign(norm, A[j, j])
        vnorm2 = 0.0
        for i in range(j, n):
            v[i] = A[i, j]
        v[j] -= alpha
        for i in range(j, n):
            vnorm2 += v[i] * v[i]
        if vnorm2 > 0.0:
            for c in range(j + 1, k):
                w = 0.0
                for i in range(j, n):
                    w += v[i] * A[i, c]
                scale = 2.0 * w / vnorm2
                for i in range(j, n):
                    A[i, c] -= scale * v[i]
            w = 0.0
            for i in range(j, n):
                w += v[i] * y[i]
            scale = 2.0 * w / vnorm2
            for i in range(j, n):
                y[i] -= scale * v[i]
        A[j, j] = alpha
        if fabs(alpha) <= tol:
            ok = False
    return ok


def householder_lstsq(X, y):
    """Least squares via Householder QR.

    Returns ``(coef, R, qty_head, rss, rank_ok)`` where ``qty_head`` holds
    the first ``k`` entries of Q^T y.
    """
    cdef double[:, ::1] A = np.array(X, dtype=np.float64, order="C", copy=True)
    cdef double[::1] b = np.array(y, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = A.shape[0], k = A.shape[1], i, j
    cdef double[::1] v = np.empty(n)
    cdef double[::1] colnorm = np.empty(k)
    cdef bint ok
    cdef double rss = 0.0, acc
    with nogil:
        ok = _householder(A, b, v, colnorm, n, k)
    R = np.triu(np.asarray(A)[:k, :k])
    qty_head = np.asarray(b)[:k].copy()
    for i in range(k, n):
        rss += b[i] * b[i]
    coef = np.full(k, np.nan)
    cdef double[::1] cf = coef
    if ok:
        for i in range(k - 1, -1, -1):
            acc = b[i]
            for j in range(i + 1, k):
                acc -= A[i, j] * cf[j]
            cf[i] = acc / A[i, i]
    return coef, R, qty_head, rss, bool(ok)


def nested_rss_batch(cnp.ndarray Y, cnp.ndarray X, int P):
    """Restricted/unrestricted lag-regression fits for every member row.

    Response ``y_t`` for t = P..T-1; columns ordered as intercept, P own
    lags, P cause lags, so the restricted design is a leading block and
    one factorization serves both models.

    Returns ``(rss_restricted, rss_unrestricted, extra_ss, status)``;
    ``extra_ss`` is the drop in rss computed without cancellation and
    ``status`` is 0 for success, 1 for rank deficiency.
    """
    cdef double[:, ::1] Yv = np.ascontiguousarray(Y, dtype=np.float64)
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t N = Yv.shape[0], T = Yv.shape[1]
    cdef Py_ssize_t n = T - P, kr = 1 + P, ku = 1 + 2 * P
    cdef Py_ssize_t m, t, p, i
    if n < ku:
        raise ValueError("not enough observations for the lag regression")
    out_r = np.empty(N)
    out_u = np.empty(N)
    out_x = np.empty(N)
    status = np.zeros(N, dtype=np.int8)
    cdef double[::1] rr = out_r, ru = out_u, rx = out_x
    cdef signed char[::1] st = status
    cdef double[:, ::1] A = np.empty((n, ku))
    cdef double[::1] b = np.empty(n)
    cdef double[::1] v = np.empty(n)
    cdef double[::1] colnorm = np.empty(ku)
    cdef double tail, mid
    with nogil:
        for m in range(N):
            for t in range(n):
                A[t, 0] = 1.0
                for p in range(1, P + 1):
                    A[t, p] = Yv[m, t + P - p]
                    A[t, P + p] = Xv[m, t + P - p]
                b[t] = Yv[m, t + P]
            if not _householder(A, b, v, colnorm, n, ku):
                st[m] = 1
            tail = 0.0
            for i in range(ku, n):
                tail += b[i] * b[i]
            mid = 0.0
            for i in range(kr, ku):
                mid += b[i] * b[i]
            ru[m] = tail
            rx[m] = mid
            rr[m] = tail + mid
    return out_r, out_u, out_x, status


def simulate_ar1_pair(delta, theta, beta, eta, eps, bint instantaneous):
    """Recursive bivariate AR(1) generation from zero initial values."""
    cdef double[::1] d = np.ascontiguousarray(delta, dtype=np.float64)
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[::1] be = np.ascontiguousarray(beta, dtype=np.float64)
    cdef double[:, ::1] e1 = np.ascontiguousarray(eta, dtype=np.float64)
    cdef double[:, ::1] e2 = np.ascontiguousarray(eps, dtype=np.float64)
    cdef Py_ssize_t N = e1.shape[0], S = e1.shape[1], m, t
    Xo = np.empty((N, S))
    Yo = np.empty((N, S))
    cdef double[:, ::1] Xa = Xo, Ya = Yo
    cdef double xprev, yprev, xcur
    with nogil:
        for m in range(N):
            xprev = 0.0
            yprev = 0.0
            for t in range(S):
                xcur = d[m] * xprev + e1[m, t]
                if instantaneous:
                    Ya[m, t] = th[m] * yprev + be[m] * xcur + e2[m, t]
                else:
                    Ya[m, t] = th[m] * yprev + be[m] * xprev + e2[m, t]
                Xa[m, t] = xcur
                xprev = xcur
                yprev = Ya[m, t]
    return Xo, Yo


def rebuild_null_ar(coef, resid, init):
    """y_t = c_0 + sum_p c_p y_{t-p} + e_t, seeded with ``init`` (N x P)."""
    cdef double[:, ::1] c = np.ascontiguousarray(coef, dtype=np.float64)
    cdef double[:, ::1] e = np.ascontiguousarray(resid, dtype=np.float64)
    cdef double[:, ::1] y0 = np.ascontiguousarray(init, dtype=np.float64)
    cdef Py_ssize_t N = e.shape[0], n = e.shape[1], P = y0.shape[1], m, t, p
    out = np.empty((N, P + n))
    cdef double[:, ::1] Yo = out
    cdef double acc
    with nogil:
        for m in range(N):
            for p in range(P):
                Yo[m, p] = y0[m, p]
            for t in range(n):
                acc = c[m, 0] + e[m, t]
                for p in range(1, P + 1):
                    acc += c[m, p] * Yo[m, P + t - p]
                Yo[m, P + t] = acc
    return out


cdef double _betacf(double a, double b, double x, double tol, int max_iter) noexcept nogil:
    cdef double qab = a + b, qap = a + 1.0, qam = a - 1.0
    cdef double c = 1.0, d = 1.0 - qab * x / qap, aa, delta, h
    cdef int m, m2
    if fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < tol:
            return h
    return -h  # negative flags non-convergence; h itself is positive


def betainc_reg(double a, double b, double x, double tol=1e-12, int max_iter=300):
    """Regularized incomplete beta I_x(a, b); raises RuntimeError on non-convergence."""
    cdef double front, cf
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        cf = _betacf(a, b, x, tol, max_iter)
        if cf < 0:
            raise RuntimeError("incomplete beta continued fraction did not converge")
        return front * cf / a
    cf = _betacf(b, a, 1.0 - x, tol, max_iter)
    if cf < 0:
        raise RuntimeError("incomplete beta continued fraction did not converge")
    return 1.0 - front * cf / b
