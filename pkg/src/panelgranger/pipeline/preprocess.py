"""Windowing, standardization, differencing to stationarity, constant pruning."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd

from ..errors import DomainError, EmptyPanel
from ..granger import Panel
from ..stationarity import DEFAULT_ADF_LAGS, IntegrationReport, difference, integration_order_search


@dataclass
class PreprocessReport:
    members_dropped_missing: list[str]
    members_dropped_constant: list[str]
    window: tuple[str, str]
    integration_order: int
    final_n: int
    final_t: int
    order_search: IntegrationReport | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["window"] = list(self.window)
        if self.order_search is not None:
            out["order_search"] = {
                "gamma": self.order_search.gamma,
                "alpha": self.order_search.alpha,
                "per_order_pvalues": [
                    {"d": d, "p_x": px, "p_y": py} for d, px, py in self.order_search.per_order_pvalues
                ],
            }
        return out


def _locate(timestamps: list[str], wanted) -> int:
    wanted_s = str(wanted).strip()
    if wanted_s in timestamps:
        return timestamps.index(wanted_s)
    parsed = pd.to_datetime(pd.Series(timestamps), errors="coerce", format="mixed")
    target = pd.to_datetime(pd.Series([wanted_s]), errors="coerce", format="mixed").iloc[0]
    if pd.isna(target) or parsed.isna().all():
        raise DomainError(f"timestamp {wanted!r} not in the panel")
    hits = np.flatnonzero((parsed == target).to_numpy())
    if hits.size == 0:
        raise DomainError(f"timestamp {wanted!r} not in the panel")
    return int(hits[0])


def slice_window(panel: Panel, timestamps: Sequence, window) -> tuple[Panel, list[str]]:
    """Restrict to the inclusive window ``(start, end)``; ``None`` keeps everything."""
    timestamps = [str(t) for t in timestamps]
    if window is None:
        return panel, timestamps
    start, end = window
    i = 0 if start is None else _locate(timestamps, start)
    j = len(timestamps) - 1 if end is None else _locate(timestamps, end)
    if j < i:
        raise DomainError(f"window end {end!r} precedes start {start!r}")
    return Panel(panel.x[:, i:j + 1], panel.y[:, i:j + 1], panel.labels), timestamps[i:j + 1]


def _flat(a: np.ndarray) -> np.ndarray:
    # relative tolerance: a standardized trend differences to rounding noise
    scale = np.max(np.abs(a), axis=1)
    return np.ptp(a, axis=1) <= 1e-9 * scale


def _constant_rows(panel: Panel) -> np.ndarray:
    return _flat(panel.x) | _flat(panel.y)


def _drop(panel: Panel, mask: np.ndarray) -> tuple[Panel | None, list[str]]:
    dropped = [lab for lab, m in zip(panel.labels, mask) if m]
    if mask.all():
        return None, dropped
    return (panel.subset(~mask) if mask.any() else panel), dropped


def standardize(panel: Panel) -> Panel:
    """Each series to mean 0 and (population) standard deviation 1."""
    def z(a):
        return (a - a.mean(axis=1, keepdims=True)) / a.std(axis=1, keepdims=True)
    return Panel(z(panel.x), z(panel.y), panel.labels)


def preprocess(
    panel: Panel,
    timestamps: Sequence | None = None,
    window=None,
    gamma: float = 0.5,
    alpha: float = 0.05,
    adf_lags: int = DEFAULT_ADF_LAGS,
    max_order: int = 3,
    dropped_missing: Sequence[str] = (),
    strict: bool = False,
) -> tuple[Panel, PreprocessReport]:
    """Window, standardize, difference to the searched order, prune constants.

    Members that are constant inside the window cannot be standardized and
    are pruned together with those that become constant after differencing.
    """
    if panel is None:
        raise EmptyPanel("no members left after dropping missing values")
    if timestamps is None:
        timestamps = list(range(panel.n_timestamps))
    panel, times = slice_window(panel, timestamps, window)
    panel, const_before = _drop(panel, _constant_rows(panel))
    if panel is None:
        raise EmptyPanel("every member is constant inside the window")
    panel = standardize(panel)
    search = integration_order_search(panel, adf_lags, gamma, alpha, max_order, strict=strict)
    d = search.order
    if d:
        panel = Panel(difference(panel.x, d), difference(panel.y, d), panel.labels)
    panel, const_after = _drop(panel, _constant_rows(panel))
    if panel is None:
        raise EmptyPanel("every member is constant after differencing")
    report = PreprocessReport(
        members_dropped_missing=list(dropped_missing),
        members_dropped_constant=const_before + const_after,
        window=(times[0], times[-1]),
        integration_order=d,
        final_n=panel.n_members,
        final_t=panel.n_timestamps,
        order_search=search,
    )
    return panel, report
