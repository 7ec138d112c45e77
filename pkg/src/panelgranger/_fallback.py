"""numpy implementations of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import math

import numpy as np

_EPS = np.finfo(np.float64).eps
_FPMIN = 1e-300


def _rank_ok(R: np.ndarray, X: np.ndarray) -> bool:
    n = X.shape[0]
    big = float(np.max(np.linalg.norm(X, axis=0))) if X.size else 0.0
    tol = n * _EPS * big
    return bool(big > 0 and np.all(np.abs(np.diag(R)) > tol))


def householder_lstsq(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    k = X.shape[1]
    Q, R = np.linalg.qr(X, mode="reduced")
    qty = Q.T @ y
    ok = _rank_ok(R, X)
    coef = np.full(k, np.nan)
    if ok:
        coef = _back_substitute(R, qty)
    resid = y - Q @ qty
    rss = float(resid @ resid)
    return coef, R, qty, rss, ok


def _back_substitute(R, b):
    k = R.shape[0]
    out = np.empty(k)
    for i in range(k - 1, -1, -1):
        out[i] = (b[i] - R[i, i + 1:] @ out[i + 1:]) / R[i, i]
    return out


def lag_design(Y: np.ndarray, X: np.ndarray, P: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked designs (N, T-P, 1+2P) and responses (N, T-P)."""
    N, T = Y.shape
    n = T - P
    design = np.empty((N, n, 1 + 2 * P))
    design[:, :, 0] = 1.0
    for p in range(1, P + 1):
        design[:, :, p] = Y[:, P - p:T - p]
        design[:, :, P + p] = X[:, P - p:T - p]
    return design, Y[:, P:]


def nested_rss_batch(Y, X, P):
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    N, T = Y.shape
    n, kr, ku = T - P, 1 + P, 1 + 2 * P
    if n < ku:
        raise ValueError("not enough observations for the lag regression")
    design, resp = lag_design(Y, X, P)
    Q, R = np.linalg.qr(design, mode="reduced")
    qty = np.einsum("mij,mi->mj", Q, resp)
    resid = resp - np.einsum("mij,mj->mi", Q, qty)
    rss_u = np.einsum("mi,mi->m", resid, resid)
    extra = np.einsum("mj,mj->m", qty[:, kr:ku], qty[:, kr:ku])
    big = np.max(np.linalg.norm(design, axis=1), axis=1)
    diag = np.abs(np.diagonal(R, axis1=1, axis2=2))
    ok = (big > 0) & np.all(diag > (n * _EPS * big)[:, None], axis=1)
    status = np.where(ok, 0, 1).astype(np.int8)
    return rss_u + extra, rss_u, extra, status


def simulate_ar1_pair(delta, theta, beta, eta, eps, instantaneous):
    delta = np.asarray(delta, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    N, S = eta.shape
    X = np.empty((N, S))
    Y = np.empty((N, S))
    xprev = np.zeros(N)
    yprev = np.zeros(N)
    for t in range(S):
        xcur = delta * xprev + eta[:, t]
        driver = xcur if instantaneous else xprev
        ycur = theta * yprev + beta * driver + eps[:, t]
        X[:, t] = xcur
        Y[:, t] = ycur
        xprev, yprev = xcur, ycur
    return X, Y


def rebuild_null_ar(coef, resid, init):
    coef = np.asarray(coef, dtype=np.float64)
    resid = np.asarray(resid, dtype=np.float64)
    init = np.asarray(init, dtype=np.float64)
    N, n = resid.shape
    P = init.shape[1]
    out = np.empty((N, P + n))
    out[:, :P] = init
    for t in range(n):
        acc = coef[:, 0] + resid[:, t]
        for p in range(1, P + 1):
            acc = acc + coef[:, p] * out[:, P + t - p]
        out[:, P + t] = acc
    return out


def _betacf(a, b, x, tol, max_iter):
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def betainc_reg(a, b, x, tol=1e-12, max_iter=300):
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x, tol, max_iter) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x, tol, max_iter) / b
