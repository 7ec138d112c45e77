"""Augmented Dickey-Fuller tests, their panel aggregation and differencing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .aggregation import qppa_fixed
from .errors import (
    DegenerateSeries,
    DomainError,
    InsufficientData,
    MemberError,
    OrderNotFound,
    RankDeficient,
    StatisticalError,
)
from .granger import Panel
from .numstats import norm_sf, ols_fit

RegressionKind = Literal["constant", "constant_trend", "none"]
REGRESSION_KINDS = ("constant", "constant_trend", "none")
DEFAULT_ADF_LAGS = 12

# MacKinnon (1994) response surfaces for a single I(1) series: the p-value
# is Phi(poly(tau)) with the small-p polynomial left of tau_star.
_TAU_MAX = {"none": math.inf, "constant": 2.74, "constant_trend": 0.7}
_TAU_MIN = {"none": -19.04, "constant": -18.83, "constant_trend": -16.18}
_TAU_STAR = {"none": -1.04, "constant": -1.61, "constant_trend": -2.89}
_SMALL_P = {
    "none": (0.6344, 1.2378, 3.2496e-2),
    "constant": (2.1659, 1.4412, 3.8269e-2),
    "constant_trend": (3.2512, 1.6047, 4.9588e-2),
}
_LARGE_P = {
    "none": (0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2),
    "constant": (1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2),
    "constant_trend": (2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2),
}
# MacKinnon (2010) critical values at 1%, 5%, 10%: asymptotic value and
# coefficients on 1/n, 1/n^2, 1/n^3.
_CRIT_2010 = {
    "none": ((-2.56574, -2.2358, -3.627, 0.0), (-1.941, -0.2686, -3.365, 31.223), (-1.61682, 0.2656, -2.714, 25.364)),
    "constant": ((-3.43035, -6.5393, -16.786, -79.433), (-2.86154, -2.8903, -4.234, -40.04), (-2.56677, -1.5384, -2.809, 0.0)),
    "constant_trend": ((-3.95877, -9.0531, -28.428, -134.155), (-3.41049, -4.3904, -9.036, -45.374), (-3.12705, -2.5856, -3.925, -22.38)),
}


def _check_kind(kind: str) -> None:
    if kind not in REGRESSION_KINDS:
        raise DomainError(f"regression_kind must be one of {REGRESSION_KINDS}, got {kind!r}")


def mackinnon_p(tau: float, regression_kind: str = "constant") -> float:
    """Approximate p-value of a Dickey-Fuller t statistic."""
    _check_kind(regression_kind)
    if tau > _TAU_MAX[regression_kind]:
        return 1.0
    if tau < _TAU_MIN[regression_kind]:
        return 0.0
    coef = _SMALL_P[regression_kind] if tau <= _TAU_STAR[regression_kind] else _LARGE_P[regression_kind]
    poly = sum(c * tau**j for j, c in enumerate(coef))
    return 1.0 - norm_sf(poly)


def mackinnon_crit(regression_kind: str = "constant", nobs: float = math.inf) -> tuple[float, float, float]:
    """1%, 5% and 10% critical values for sample size ``nobs``."""
    _check_kind(regression_kind)
    inv = 0.0 if math.isinf(nobs) else 1.0 / nobs
    return tuple(sum(c * inv**j for j, c in enumerate(row)) for row in _CRIT_2010[regression_kind])


@dataclass(frozen=True)
class AdfResult:
    t_stat: float
    n_lags: int
    regression_kind: str
    p_value: float
    nobs: int
    coefficient: float = field(default=float("nan"), repr=False)


def _n_deterministic(kind: str) -> int:
    return {"none": 0, "constant": 1, "constant_trend": 2}[kind]


def adf_design(series, n_lags: int, regression_kind: str = "constant") -> tuple[np.ndarray, np.ndarray]:
    """Design for dy_t on [y_{t-1}, dy_{t-1..t-k}, deterministic terms]."""
    y = np.asarray(series, dtype=np.float64)
    T = y.size
    dy = np.diff(y)
    nobs = T - 1 - n_lags
    cols = [y[n_lags:T - 1]]
    for j in range(1, n_lags + 1):
        cols.append(dy[n_lags - j:T - 1 - j])
    if regression_kind in ("constant", "constant_trend"):
        cols.append(np.ones(nobs))
    if regression_kind == "constant_trend":
        cols.append(np.arange(1, nobs + 1, dtype=np.float64))
    return np.column_stack(cols), dy[n_lags:]


def adf_test(series, n_lags: int = DEFAULT_ADF_LAGS, regression_kind: str = "constant") -> AdfResult:
    """Augmented Dickey-Fuller test with a fixed number of lagged differences.

    The null hypothesis is a unit root; small p-values indicate stationarity.
    """
    _check_kind(regression_kind)
    if int(n_lags) != n_lags or n_lags < 0:
        raise DomainError(f"n_lags must be a nonnegative integer, got {n_lags}")
    n_lags = int(n_lags)
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1:
        raise DomainError("adf_test expects a 1-d series")
    if not np.all(np.isfinite(y)):
        raise DomainError("series contains non-finite values")
    n_reg = 1 + n_lags + _n_deterministic(regression_kind)
    need = n_lags + 4 + n_reg
    if y.size < need:
        raise InsufficientData(f"series of length {y.size} too short; need at least {need}")
    if np.ptp(y) == 0:
        raise DegenerateSeries("constant series")
    X, dy = adf_design(y, n_lags, regression_kind)
    try:
        fit = ols_fit(X, dy)
    except RankDeficient as exc:
        raise DegenerateSeries("ADF design is collinear; the series is deterministic") from exc
    if fit.rss <= X.shape[0] * (100 * np.finfo(float).eps) ** 2 * float(dy @ dy):
        raise DegenerateSeries("ADF regression fits exactly; the series is deterministic")
    sigma2 = fit.rss / fit.df_resid
    se = math.sqrt(sigma2 * fit.xtx_inv_diag()[0])
    t_stat = float(fit.coefficients[0] / se)
    return AdfResult(
        t_stat=t_stat,
        n_lags=n_lags,
        regression_kind=regression_kind,
        p_value=mackinnon_p(t_stat, regression_kind),
        nobs=X.shape[0],
        coefficient=float(fit.coefficients[0]),
    )


@dataclass(frozen=True)
class PanelAdfResult:
    p_value: float
    gamma: float
    member_pvalues: np.ndarray
    skipped: tuple[str, ...] = ()


def panel_adf(
    series: Sequence[np.ndarray] | np.ndarray,
    n_lags: int = DEFAULT_ADF_LAGS,
    regression_kind: str = "constant",
    gamma: float = 0.5,
    labels: Sequence[str] | None = None,
    strict: bool = True,
) -> PanelAdfResult:
    """Panel unit-root test: member ADF p-values aggregated at quantile ``gamma``.

    Null: every member has a unit root.
    """
    rows = [np.asarray(s, dtype=np.float64) for s in series]
    if labels is None:
        labels = [str(i) for i in range(len(rows))]
    pvals, skipped = [], []
    for label, row in zip(labels, rows):
        try:
            pvals.append(adf_test(row, n_lags, regression_kind).p_value)
        except StatisticalError as exc:
            if strict:
                raise MemberError(label, exc) from exc
            skipped.append(label)
    if not pvals:
        raise InsufficientData("no member produced an ADF p-value")
    agg = qppa_fixed(pvals, gamma)
    return PanelAdfResult(agg.p_value, gamma, np.array(pvals), tuple(skipped))


def difference(series, d: int) -> np.ndarray:
    """Apply the first-difference operator ``d`` times along the last axis."""
    arr = np.asarray(series, dtype=np.float64)
    if int(d) != d or d < 0:
        raise DomainError(f"difference order must be a nonnegative integer, got {d}")
    if arr.shape[-1] <= d:
        raise InsufficientData(f"cannot difference a length-{arr.shape[-1]} series {d} times")
    return np.diff(arr, n=int(d), axis=-1) if d else arr.copy()


@dataclass(frozen=True)
class IntegrationReport:
    order: int | None
    per_order_pvalues: list[tuple[int, float, float]]
    gamma: float
    alpha: float


def integration_order_search(
    panel: Panel,
    n_lags: int = DEFAULT_ADF_LAGS,
    gamma: float = 0.5,
    alpha: float = 0.05,
    max_order: int = 3,
    regression_kind: str = "constant",
    strict: bool = True,
) -> IntegrationReport:
    """Smallest d at which both differenced panels reject a panel unit root.

    Raises :class:`OrderNotFound` (carrying the partial report as
    ``.report``) when no d up to ``max_order`` rejects.
    """
    if max_order < 0:
        raise DomainError("max_order must be nonnegative")
    rows = []
    for d in range(max_order + 1):
        if panel.n_timestamps - d < 1:
            break
        xs = difference(panel.x, d)
        ys = difference(panel.y, d)
        px = panel_adf(xs, n_lags, regression_kind, gamma, panel.labels, strict).p_value
        py = panel_adf(ys, n_lags, regression_kind, gamma, panel.labels, strict).p_value
        rows.append((d, px, py))
        if px <= alpha and py <= alpha:
            return IntegrationReport(d, rows, gamma, alpha)
    err = OrderNotFound(f"no differencing order up to {max_order} rejects a unit root at alpha={alpha}")
    err.report = IntegrationReport(None, rows, gamma, alpha)
    raise err
