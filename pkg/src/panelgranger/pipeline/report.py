"""Report serialization: JSON, aligned plain-text tables and CSV plot data."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def to_json(report) -> str:
    data = report.to_dict() if hasattr(report, "to_dict") else report
    return json.dumps(_clean(data), indent=2, ensure_ascii=False)


def format_table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in headers]] + [[str(v) for v in row] for row in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def to_text(report) -> str:
    return format_table(*report.table())


def write_csv(path: str | Path, headers: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        writer.writerows(rows)


def write_report(report, stem: str | Path) -> list[Path]:
    """Write ``<stem>.json`` and ``<stem>.txt``; return the paths."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    js, txt = stem.with_suffix(".json"), stem.with_suffix(".txt")
    js.write_text(to_json(report) + "\n", encoding="utf-8")
    txt.write_text(to_text(report), encoding="utf-8")
    return [js, txt]


def sweep_plot_data(report, path: str | Path) -> None:
    """Columns gamma, power, fdr for plotting the sweep."""
    write_csv(path, ["gamma", "power", "fdr"],
              [[float(g), float(p), float(f)] for g, p, f in zip(report.gammas, report.power, report.fdr)])
