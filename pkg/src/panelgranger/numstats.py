"""Least squares, the F distribution and empirical quantiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DimensionMismatch, DomainError, RankDeficient


@dataclass(frozen=True)
class OlsFit:
    """Result of :func:`ols_fit`.

    ``r_factor`` is the upper-triangular QR factor of the design; it is
    kept so callers can form ``(X'X)^{-1}`` without refactoring.
    """

    coefficients: np.ndarray
    rss: float
    df_resid: int
    r_factor: np.ndarray

    def xtx_inv_diag(self) -> np.ndarray:
        rinv = np.linalg.inv(self.r_factor)
        return np.einsum("ij,ij->i", rinv, rinv)


def ols_fit(design, response) -> OlsFit:
    """Ordinary least squares by Householder QR.

    Raises
    ------
    DimensionMismatch
        If ``response`` does not have one entry per design row.
    RankDeficient
        If a diagonal entry of R falls below ``n * eps * max column norm``.
    """
    X = np.asarray(design, dtype=np.float64)
    y = np.asarray(response, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1:
        raise DimensionMismatch(f"expected 2-d design and 1-d response, got {X.shape} and {y.shape}")
    n, k = X.shape
    if y.shape[0] != n:
        raise DimensionMismatch(f"design has {n} rows but response has {y.shape[0]} entries")
    if n < k or k < 1:
        raise RankDeficient(f"{n} observations cannot identify {k} coefficients")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DomainError("design and response must be finite")
    coef, R, _, rss, ok = _backend.householder_lstsq(X, y)
    if not ok:
        raise RankDeficient("design matrix is numerically rank deficient")
    return OlsFit(coefficients=coef, rss=float(rss), df_resid=n - k, r_factor=R)


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b) (Lentz continued fraction)."""
    if a <= 0 or b <= 0:
        raise DomainError("shape parameters must be positive")
    return float(_backend.betainc_reg(float(a), float(b), float(x)))


def f_cdf(x: float, d1: int, d2: int) -> float:
    """P(F_{d1,d2} <= x)."""
    if d1 <= 0 or d2 <= 0:
        raise DomainError(f"degrees of freedom must be positive, got ({d1}, {d2})")
    if not x >= 0:
        raise DomainError(f"F quantile must be nonnegative, got {x}")
    if math.isinf(x):
        return 1.0
    z = d1 * x
    return betainc_reg(d1 / 2.0, d2 / 2.0, z / (z + d2))


def f_sf(x: float, d1: int, d2: int) -> float:
    """Upper tail, defined as ``1 - f_cdf`` so the two always sum to one."""
    return 1.0 - f_cdf(x, d1, d2)


def norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def quantile_rank(m: int, gamma: float) -> int:
    """Smallest k with k/m >= gamma, i.e. ceil(gamma*m) without rounding slips."""
    k = max(1, math.ceil(gamma * m))
    while k > 1 and (k - 1) / m >= gamma:
        k -= 1
    while k < m and k / m < gamma:
        k += 1
    return k


def empirical_quantile(values, gamma: float) -> float:
    """The ceil(gamma*m)-th smallest of the m values (inverse empirical CDF)."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise DomainError("empirical quantile of an empty sample")
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    k = quantile_rank(v.size, gamma)
    return float(np.partition(v, k - 1)[k - 1])
