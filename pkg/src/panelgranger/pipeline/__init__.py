"""Data ingestion, preprocessing and experiment harness."""

from .harness import (
    METHODS,
    CellResult,
    DirectionalStudyResult,
    GammaSweepReport,
    PowerFdrReport,
    StudyRow,
    directional_study,
    gamma_sweep,
    panel_pvalue,
    run_power_fdr,
    verdict,
)
from .io import IngestResult, detect_layout, ingest_panel_csv, write_long, write_wide
from .preprocess import PreprocessReport, preprocess, slice_window, standardize
from .report import format_table, to_json, to_text, write_report

__all__ = [
    "METHODS", "CellResult", "DirectionalStudyResult", "GammaSweepReport", "PowerFdrReport",
    "StudyRow", "directional_study", "gamma_sweep", "panel_pvalue", "run_power_fdr", "verdict",
    "IngestResult", "detect_layout", "ingest_panel_csv", "write_long", "write_wide",
    "PreprocessReport", "preprocess", "slice_window", "standardize",
    "format_table", "to_json", "to_text", "write_report",
]
