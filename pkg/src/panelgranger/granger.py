"""Per-member Granger non-causality F tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from . import _backend
from ._fallback import lag_design
from .errors import (
    DegenerateSeries,
    DimensionMismatch,
    DomainError,
    InsufficientData,
    MemberError,
    RankDeficient,
)
from .numstats import f_sf

Direction = Literal["x_to_y", "y_to_x"]
DIRECTIONS: tuple[str, str] = ("x_to_y", "y_to_x")

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class SeriesPair:
    """Candidate cause ``x`` and candidate effect ``y`` on a common time grid."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
            raise DimensionMismatch(f"series must be 1-d with equal length, got {x.shape} and {y.shape}")
        if x.size < 1:
            raise InsufficientData("empty series")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("series contain non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def swapped(self) -> "SeriesPair":
        return SeriesPair(self.y, self.x)


class Panel:
    """N members, each a (x, y) pair of length T, stored as two N x T arrays."""

    def __init__(self, x, y, labels: Sequence[str] | None = None):
        x = np.array(x, dtype=np.float64, ndmin=2)
        y = np.array(y, dtype=np.float64, ndmin=2)
        if x.ndim != 2 or x.shape != y.shape:
            raise DimensionMismatch(f"x and y panels must share shape, got {x.shape} and {y.shape}")
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise InsufficientData("a panel needs at least one member and one timestamp")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("panel contains non-finite values")
        if labels is None:
            labels = [str(i) for i in range(x.shape[0])]
        labels = [str(lab) for lab in labels]
        if len(labels) != x.shape[0]:
            raise DimensionMismatch(f"{len(labels)} labels for {x.shape[0]} members")
        self.x = x
        self.y = y
        self.labels = labels

    @classmethod
    def from_pairs(cls, pairs: Iterable[SeriesPair], labels: Sequence[str] | None = None) -> "Panel":
        pairs = list(pairs)
        if not pairs:
            raise InsufficientData("a panel needs at least one member")
        lengths = {p.x.size for p in pairs}
        if len(lengths) != 1:
            raise DimensionMismatch(f"members have differing lengths {sorted(lengths)}")
        return cls(np.stack([p.x for p in pairs]), np.stack([p.y for p in pairs]), labels)

    @property
    def n_members(self) -> int:
        return self.x.shape[0]

    @property
    def n_timestamps(self) -> int:
        return self.x.shape[1]

    @property
    def members(self) -> list[SeriesPair]:
        return [SeriesPair(self.x[i], self.y[i]) for i in range(self.n_members)]

    def __len__(self) -> int:
        return self.n_members

    def __getitem__(self, i: int) -> SeriesPair:
        return SeriesPair(self.x[i], self.y[i])

    def swapped(self) -> "Panel":
        return Panel(self.y, self.x, self.labels)

    def oriented(self, direction: str) -> "Panel":
        """The panel arranged so that the tested cause is ``x``."""
        if direction == "x_to_y":
            return self
        if direction == "y_to_x":
            return self.swapped()
        raise DomainError(f"direction must be one of {DIRECTIONS}, got {direction!r}")

    def subset(self, index) -> "Panel":
        index = np.asarray(index)
        if index.dtype == bool:
            index = np.flatnonzero(index)
        return Panel(self.x[index], self.y[index], [self.labels[i] for i in index])

    def __repr__(self) -> str:
        return f"Panel(N={self.n_members}, T={self.n_timestamps})"


@dataclass(frozen=True)
class MemberTestResult:
    f_stat: float
    df_num: int
    df_den: int
    p_value: float
    label: str = ""
    rss_restricted: float = field(default=float("nan"), repr=False)
    rss_unrestricted: float = field(default=float("nan"), repr=False)
    error: str | None = None

    @property
    def skipped(self) -> bool:
        return self.error is not None

    @property
    def wald(self) -> float:
        """Wald statistic for the P exclusion restrictions (= P * F)."""
        return self.df_num * self.f_stat


def min_length(lag_order: int) -> int:
    return 3 * lag_order + 2


def _check_lag(lag_order, T):
    if int(lag_order) != lag_order or lag_order < 1:
        raise DomainError(f"lag order must be a positive integer, got {lag_order}")
    if T < min_length(lag_order):
        raise InsufficientData(
            f"T={T} too short for lag order {lag_order}; need at least {min_length(lag_order)}"
        )


def _degenerate(rss_u: float, scale: float, n: int) -> bool:
    return rss_u <= n * (100 * _EPS) ** 2 * scale


def _finish(extra: float, rss_u: float, P: int, df_den: int, label: str) -> MemberTestResult:
    f_stat = (extra / P) / (rss_u / df_den)
    return MemberTestResult(
        f_stat=f_stat,
        df_num=P,
        df_den=df_den,
        p_value=f_sf(f_stat, P, df_den),
        label=label,
        rss_restricted=rss_u + extra,
        rss_unrestricted=rss_u,
    )


def granger_member_test(pair: SeriesPair, lag_order: int, label: str = "") -> MemberTestResult:
    """F test that the lags of ``pair.x`` add nothing to an AR(P) model of ``pair.y``.

    Both models include an intercept and use the common sample t = P..T-1.
    The restricted fit shares the unrestricted QR factorization, since its
    design is the leading column block.
    """
    P = int(lag_order)
    T = pair.x.size
    _check_lag(lag_order, T)
    design, resp = lag_design(pair.y[None, :], pair.x[None, :], P)
    design, resp = design[0], resp[0]
    n, ku = design.shape
    _, _, qty, rss_u, ok = _backend.householder_lstsq(design, resp)
    if not ok:
        raise RankDeficient("lag design is rank deficient (constant or collinear series?)")
    if _degenerate(rss_u, float(resp @ resp), n):
        raise DegenerateSeries("unrestricted residual sum of squares is zero")
    extra = float(qty[1 + P:] @ qty[1 + P:])
    return _finish(extra, float(rss_u), P, n - ku, label)


def granger_panel(
    panel: Panel,
    lag_order: int,
    direction: str = "x_to_y",
    strict: bool = True,
) -> list[MemberTestResult]:
    """Apply :func:`granger_member_test` to every member, in panel order.

    With ``strict=False`` failing members are returned with ``error`` set
    (and NaN statistics) instead of aborting the whole panel.
    """
    panel = panel.oriented(direction)
    P = int(lag_order)
    _check_lag(lag_order, panel.n_timestamps)
    _, rss_u, extra, status = _backend.nested_rss_batch(panel.y, panel.x, P)
    n = panel.n_timestamps - P
    df_den = n - (1 + 2 * P)
    scale = np.einsum("ij,ij->i", panel.y[:, P:], panel.y[:, P:])
    out = []
    for i, label in enumerate(panel.labels):
        err: Exception | None = None
        if status[i]:
            err = RankDeficient("lag design is rank deficient (constant or collinear series?)")
        elif _degenerate(rss_u[i], scale[i], n):
            err = DegenerateSeries("unrestricted residual sum of squares is zero")
        if err is None:
            out.append(_finish(float(extra[i]), float(rss_u[i]), P, df_den, label))
            continue
        if strict:
            raise MemberError(label, err)
        out.append(
            MemberTestResult(
                f_stat=float("nan"), df_num=P, df_den=df_den, p_value=float("nan"),
                label=label, error=f"{type(err).__name__}: {err}",
            )
        )
    return out


def p_values(results: Sequence[MemberTestResult]) -> np.ndarray:
    """p-values of the members that were not skipped."""
    return np.array([r.p_value for r in results if not r.skipped], dtype=np.float64)
