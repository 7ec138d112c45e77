"""Dumitrescu-Hurlin homogeneous non-causality tests.

The panel statistic is the average of the member Wald statistics,
standardized either with its asymptotic moments (``z_asymptotic``) or
with the exact finite-T moments of a Wald statistic built from an
F(P, T~ - 2P - 1) variable (``z_semi``).  Rejection is one-sided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DomainError, InsufficientData, NonFiniteBootstrapSeries
from .granger import Panel, granger_panel
from .numstats import norm_sf, ols_fit

DEFAULT_BREPS = 99


@dataclass(frozen=True)
class DhResult:
    w_bar: float
    z_asymptotic: float
    z_semi: float
    p_asymptotic: float
    p_semi: float
    per_member_wald: np.ndarray
    lag_order: int
    t_eff: int

    @property
    def n_members(self) -> int:
        return int(self.per_member_wald.size)


@dataclass(frozen=True)
class BootstrapResult:
    observed: DhResult
    bootstrap_z: np.ndarray
    p_value: float
    breps: int
    block_size: int
    seed: int
    redraws: int = 0


def wald_moments(lag_order: int, t_eff: int) -> tuple[float, float]:
    """Exact mean and variance of P * F(P, t_eff - 2P - 1)."""
    P = lag_order
    d = t_eff - 2 * P
    if d - 1 < 6:
        raise InsufficientData(
            f"effective sample {t_eff} too short for lag order {P}: "
            f"need t_eff - 2P - 1 >= 6 for finite Wald moments"
        )
    mean = P * (d - 1) / (d - 3)
    var = 2 * P * (d - 1) ** 2 * (t_eff - P - 3) / ((d - 3) ** 2 * (d - 5))
    return mean, var


def _standardize(wald: np.ndarray, P: int, t_eff: int) -> DhResult:
    N = wald.size
    mean, var = wald_moments(P, t_eff)
    w_bar = float(np.mean(wald))
    z_asym = math.sqrt(N / (2 * P)) * (w_bar - P)
    z_semi = math.sqrt(N) * (w_bar - mean) / math.sqrt(var)
    return DhResult(
        w_bar=w_bar,
        z_asymptotic=z_asym,
        z_semi=z_semi,
        p_asymptotic=norm_sf(z_asym),
        p_semi=norm_sf(z_semi),
        per_member_wald=wald,
        lag_order=P,
        t_eff=t_eff,
    )


def dh_statistics(panel: Panel, lag_order: int, direction: str = "x_to_y", strict: bool = True) -> DhResult:
    P = int(lag_order)
    t_eff = panel.n_timestamps - P
    wald_moments(P, t_eff)
    results = granger_panel(panel, P, direction, strict=strict)
    wald = np.array([r.wald for r in results if not r.skipped], dtype=np.float64)
    if wald.size == 0:
        raise InsufficientData("every member failed the Granger regression")
    return _standardize(wald, P, t_eff)


def _z_semi_batch(y: np.ndarray, x: np.ndarray, P: int, mean: float, var: float) -> float | None:
    _, rss_u, extra, status = _backend.nested_rss_batch(y, x, P)
    if np.any(status) or np.any(rss_u <= 0):
        return None
    df_den = y.shape[1] - P - (1 + 2 * P)
    wald = extra / (rss_u / df_den)
    return math.sqrt(wald.size) * (float(np.mean(wald)) - mean) / math.sqrt(var)


def _resample_index(rng: np.random.Generator, n: int, block_size: int) -> np.ndarray:
    n_blocks = -(-n // block_size)
    starts = rng.integers(0, n - block_size + 1, size=n_blocks)
    return (starts[:, None] + np.arange(block_size)[None, :]).ravel()[:n]


def dh_block_bootstrap(
    panel: Panel,
    lag_order: int,
    direction: str = "x_to_y",
    breps: int = DEFAULT_BREPS,
    block_size: int = 1,
    seed: int = 0,
    strict: bool = True,
) -> BootstrapResult:
    """Residual block bootstrap of ``z_semi`` under non-causality.

    Each member's effect series is refit under the null (intercept plus
    own lags), and bootstrap series are rebuilt recursively from the
    observed first P values and resampled residual blocks.  Block
    positions are drawn once per replication and shared by all members,
    so the cross-sectional dependence of the residuals is preserved.
    The cause series are kept as observed.
    """
    P = int(lag_order)
    if breps < 1:
        raise DomainError("breps must be positive")
    if block_size < 1:
        raise DomainError("block_size must be positive")
    observed = dh_statistics(panel, P, direction, strict=strict)
    oriented = panel.oriented(direction)
    if observed.n_members != oriented.n_members:
        keep = [r.label for r in granger_panel(oriented, P, strict=False) if not r.skipped]
        oriented = oriented.subset([oriented.labels.index(lab) for lab in keep])

    N, T = oriented.n_members, oriented.n_timestamps
    n = T - P
    if block_size > n:
        raise DomainError(f"block_size {block_size} exceeds the {n} residuals per member")
    coef = np.empty((N, P + 1))
    resid = np.empty((N, n))
    for i in range(N):
        y = oriented.y[i]
        design = np.column_stack([np.ones(n)] + [y[P - p:T - p] for p in range(1, P + 1)])
        fit = ols_fit(design, y[P:])
        coef[i] = fit.coefficients
        resid[i] = y[P:] - design @ fit.coefficients
    init = oriented.y[:, :P]
    mean, var = wald_moments(P, n)

    draws = np.empty(breps)
    attempts = 0
    max_attempts = 10 * breps
    for b in range(breps):
        retry = 0
        while True:
            if attempts >= max_attempts:
                raise NonFiniteBootstrapSeries(
                    f"gave up after {attempts} attempts; the restricted AR fits may be explosive"
                )
            attempts += 1
            rng = np.random.default_rng(np.random.SeedSequence([seed, b, retry]))
            idx = _resample_index(rng, n, block_size)
            y_star = _backend.rebuild_null_ar(coef, resid[:, idx], init)
            z = None
            if np.all(np.isfinite(y_star)):
                with np.errstate(all="ignore"):
                    z = _z_semi_batch(y_star, oriented.x, P, mean, var)
            if z is not None and math.isfinite(z):
                draws[b] = z
                break
            retry += 1

    exceed = int(np.sum(draws >= observed.z_semi))
    return BootstrapResult(
        observed=observed,
        bootstrap_z=draws,
        p_value=(1 + exceed) / (breps + 1),
        breps=breps,
        block_size=block_size,
        seed=seed,
        redraws=attempts - breps,
    )
