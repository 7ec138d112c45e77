"""Quantile aggregation of member p-values into a single panel p-value.

For a fixed quantile level ``gamma`` the panel p-value is

    Q(gamma) = min(1, gamma-quantile of {p_i / gamma})

which stays valid under arbitrary dependence between members.  The
adaptive variant searches gamma over ``(gamma_min, 1)`` and pays the
factor ``1 - log(gamma_min)`` for the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError
from .numstats import empirical_quantile

DEFAULT_GAMMA = 0.5
DEFAULT_GAMMA_MIN = 0.05


@dataclass(frozen=True)
class AggregationResult:
    p_value: float
    method: Literal["fixed_gamma", "gamma_min"]
    gamma: float
    n_members: int


def _check_pvalues(p_values) -> np.ndarray:
    p = np.asarray(p_values, dtype=np.float64).ravel()
    if p.size == 0:
        raise DomainError("no p-values to aggregate")
    if np.any(np.isnan(p)) or np.any(p < 0) or np.any(p > 1):
        raise DomainError("p-values must lie in [0, 1]")
    return p


def _check_level(value: float, name: str) -> float:
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value}")
    return float(value)


def qppa_fixed(p_values, gamma: float = DEFAULT_GAMMA) -> AggregationResult:
    p = _check_pvalues(p_values)
    gamma = _check_level(gamma, "gamma")
    q = empirical_quantile(p / gamma, gamma)
    return AggregationResult(min(1.0, q), "fixed_gamma", gamma, p.size)


def _gamma_min_exact(p: np.ndarray, gamma_min: float) -> float:
    # On ((i-1)/N, i/N] the quantile picks the i-th order statistic, so Q
    # decreases in gamma and each piece attains its infimum at i/N; the last
    # piece (toward gamma = 1) gives p_(N) in the limit.
    N = p.size
    ordered = np.sort(p)
    first = math.floor(gamma_min * N) + 1
    while first > 1 and (first - 1) / N > gamma_min:
        first -= 1
    while first / N <= gamma_min:
        first += 1
    ranks = np.arange(first, N + 1)
    return float(np.min(ordered[ranks - 1] * N / ranks))


def _gamma_min_grid(p: np.ndarray, gamma_min: float, grid_size: int) -> float:
    grid = np.linspace(gamma_min, 1.0, grid_size + 2)[1:-1]
    return min(min(1.0, empirical_quantile(p / g, g)) for g in grid)


def qppa_gamma_min(
    p_values,
    gamma_min: float = DEFAULT_GAMMA_MIN,
    grid_size: int = 1000,
    method: Literal["exact", "grid"] = "exact",
) -> AggregationResult:
    """Adaptive aggregation: ``min(1, (1 - ln gamma_min) * inf_gamma Q(gamma))``.

    ``method="exact"`` evaluates the infimum at the breakpoints of the
    piecewise quantile; ``"grid"`` scans ``grid_size`` interior points and
    is kept as a cross-check.
    """
    p = _check_pvalues(p_values)
    gamma_min = _check_level(gamma_min, "gamma_min")
    if method == "exact":
        inf_q = min(1.0, _gamma_min_exact(p, gamma_min))
    elif method == "grid":
        if grid_size < 1:
            raise DomainError("grid_size must be positive")
        inf_q = _gamma_min_grid(p, gamma_min, grid_size)
    else:
        raise DomainError(f"unknown method {method!r}")
    value = min(1.0, (1.0 - math.log(gamma_min)) * inf_q)
    return AggregationResult(value, "gamma_min", gamma_min, p.size)


def reject(p_value: float, alpha: float) -> bool:
    """Decision rule; the boundary ``p_value == alpha`` rejects."""
    if not 0.0 <= p_value <= 1.0:
        raise DomainError(f"p-value must lie in [0, 1], got {p_value}")
    _check_level(alpha, "alpha")
    return bool(p_value <= alpha)
