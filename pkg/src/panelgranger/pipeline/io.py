"""Reading and writing panels as CSV.

Two layouts are understood:

* wide: one file per variable, one row per member, a few leading label
  columns (region, country, coordinates, ...) followed by one column per
  timestamp.  The cause and effect files are joined on the label columns.
* long: a single file with columns ``member, timestamp, x, y``.

The layout is detected from the header of the first file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from ..errors import InputError, JoinError, ParseError
from ..granger import Panel

LONG_COLUMNS = ("member", "timestamp", "x", "y")
KEY_SEP = "|"


@dataclass
class IngestResult:
    panel: Panel
    timestamps: list[str]
    dropped_missing: list[str] = field(default_factory=list)
    layout: str = "wide"
    label_columns: list[str] = field(default_factory=list)


def _read_raw(path: str | Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot parse {path}: {exc}") from exc


def detect_layout(columns: Sequence[str]) -> str:
    names = {str(c).strip().lower() for c in columns}
    return "long" if set(LONG_COLUMNS) <= names else "wide"


def _looks_like_timestamp(name: str) -> bool:
    name = str(name).strip()
    try:
        float(name)
        return True
    except ValueError:
        pass
    parsed = pd.to_datetime(pd.Series([name]), errors="coerce", format="mixed")
    return not parsed.isna().iloc[0]


def infer_label_columns(columns: Sequence[str]) -> list[str]:
    """Leading columns whose header does not read as a date or a number."""
    labels = []
    for col in columns:
        if _looks_like_timestamp(col):
            break
        labels.append(str(col))
    return labels

_MISSING = {"nan", "na", "null"}


def _parse_float(text: str) -> float:
    if text == "" or text.lower() in _MISSING:
        return math.nan
    try:
        return float(text)
    except ValueError:
        return None


def _to_numeric(frame: pd.DataFrame, columns: Sequence[str], path) -> np.ndarray:
    """Numeric matrix with NaN for empty cells; anything else unparsable is an error."""
    # python's float() is correctly rounded, unlike the pandas fast parser
    out = np.empty((len(frame), len(columns)))
    for j, col in enumerate(columns):
        for i, text in enumerate(frame[col].str.strip()):
            value = _parse_float(text)
            if value is None:
                raise ParseError(f"{path}: non-numeric value {frame[col].iloc[i]!r}", row=i + 2, column=str(col))
            out[i, j] = value
    return out


def _member_keys(frame: pd.DataFrame, label_columns: Sequence[str], path) -> list[str]:
    if not label_columns:
        return [str(i) for i in range(len(frame))]
    keys = frame[list(label_columns)].apply(lambda r: KEY_SEP.join(v.strip() for v in r), axis=1).tolist()
    seen = set()
    for i, k in enumerate(keys):
        if k in seen:
            raise ParseError(f"{path}: duplicate member key {k!r}", row=i + 2)
        seen.add(k)
    return keys


def _read_wide(path, label_columns):
    frame = _read_raw(path)
    frame.columns = [str(c).strip() for c in frame.columns]
    if label_columns is None:
        label_columns = infer_label_columns(frame.columns)
    missing = [c for c in label_columns if c not in frame.columns]
    if missing:
        raise ParseError(f"{path}: label columns not found: {missing}")
    times = [c for c in frame.columns if c not in label_columns]
    if not times:
        raise ParseError(f"{path}: no timestamp columns")
    keys = _member_keys(frame, label_columns, path)
    return keys, times, _to_numeric(frame, times, path), list(label_columns)


def _drop_missing(keys, x, y):
    keep = np.all(np.isfinite(x), axis=1) & np.all(np.isfinite(y), axis=1)
    dropped = [k for k, ok in zip(keys, keep) if not ok]
    return keep, dropped


def ingest_wide(cause_path, effect_path, label_columns: Sequence[str] | None = None) -> IngestResult:
    kx, tx, x, labels = _read_wide(cause_path, label_columns)
    ky, ty, y, _ = _read_wide(effect_path, labels)
    if tx != ty:
        only = sorted(set(tx) ^ set(ty))
        raise JoinError("timestamp columns differ between files", only or ["(same set, different order)"])
    unmatched = sorted(set(kx) ^ set(ky))
    if unmatched:
        raise JoinError("member keys do not match between files", unmatched)
    order = {k: i for i, k in enumerate(ky)}
    y = y[[order[k] for k in kx]]
    keep, dropped = _drop_missing(kx, x, y)
    if not keep.any():
        return IngestResult(None, tx, dropped, "wide", labels)
    panel = Panel(x[keep], y[keep], [k for k, ok in zip(kx, keep) if ok])
    return IngestResult(panel, tx, dropped, "wide", labels)


def ingest_long(path) -> IngestResult:
    frame = _read_raw(path)
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    dup = frame.duplicated(subset=["member", "timestamp"])
    if dup.any():
        i = int(np.flatnonzero(dup.to_numpy())[0])
        raise ParseError(f"{path}: duplicate (member, timestamp) pair", row=i + 2)
    vals = _to_numeric(frame, ["x", "y"], path)
    frame = frame.assign(x=vals[:, 0], y=vals[:, 1])
    members = list(dict.fromkeys(frame["member"].str.strip()))
    times = list(dict.fromkeys(frame["timestamp"].str.strip()))
    frame["member"] = frame["member"].str.strip()
    frame["timestamp"] = frame["timestamp"].str.strip()
    wx = frame.pivot(index="member", columns="timestamp", values="x").reindex(index=members, columns=times)
    wy = frame.pivot(index="member", columns="timestamp", values="y").reindex(index=members, columns=times)
    x, y = wx.to_numpy(dtype=np.float64), wy.to_numpy(dtype=np.float64)
    keep, dropped = _drop_missing(members, x, y)
    panel = Panel(x[keep], y[keep], [m for m, ok in zip(members, keep) if ok]) if keep.any() else None
    return IngestResult(panel, times, dropped, "long", ["member"])


def ingest_panel_csv(
    cause_path,
    effect_path=None,
    label_columns: Sequence[str] | None = None,
    layout: str = "auto",
) -> IngestResult:
    """Load a panel, dropping members with any missing value in either variable.

    ``effect_path`` is required for the wide layout and ignored for long.
    ``IngestResult.panel`` is None when every member was dropped.
    """
    if layout == "auto":
        header = _read_raw(cause_path).columns
        layout = detect_layout(header)
    if layout == "long":
        return ingest_long(cause_path)
    if layout != "wide":
        raise InputError(f"unknown layout {layout!r}")
    if effect_path is None:
        raise InputError("the wide layout needs a second file for the effect variable")
    return ingest_wide(cause_path, effect_path, label_columns)


def write_long(panel: Panel, path, timestamps: Sequence | None = None) -> None:
    N, T = panel.n_members, panel.n_timestamps
    times = list(timestamps) if timestamps is not None else list(range(T))
    frame = pd.DataFrame({
        "member": np.repeat(panel.labels, T),
        "timestamp": np.tile(times, N),
        "x": panel.x.ravel(),
        "y": panel.y.ravel(),
    })
    frame.to_csv(path, index=False, float_format="%.17g")


def write_wide(panel: Panel, cause_path, effect_path, timestamps: Sequence | None = None, label: str = "member") -> None:
    times = [str(t) for t in (timestamps if timestamps is not None else range(panel.n_timestamps))]
    for values, path in ((panel.x, cause_path), (panel.y, effect_path)):
        frame = pd.DataFrame(values, columns=times)
        frame.insert(0, label, panel.labels)
        frame.to_csv(path, index=False, float_format="%.17g")
