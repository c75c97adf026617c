"""Metrics, cross-validation, timing and report generation."""

from .boundary import BoundaryGrid, bbox_from_points, boundary_grid
from .metrics import (ConfusionCounts, CVResult, RocCurve, auc, confusion, evaluate, kfold_cv,
                      kfold_indices, mann_whitney_auc, roc)
from .report import (BASELINE, REPORT_COLUMNS, BenchmarkRecord, parse_report_csv, render_report,
                     roc_ratios)
from .timing import TimingStats, time_fit, time_predict, time_predict_interleaved, timed_fit

__all__ = [
    "BoundaryGrid", "bbox_from_points", "boundary_grid",
    "ConfusionCounts", "CVResult", "RocCurve", "auc", "confusion", "evaluate", "kfold_cv",
    "kfold_indices", "mann_whitney_auc", "roc",
    "BASELINE", "REPORT_COLUMNS", "BenchmarkRecord", "parse_report_csv", "render_report",
    "roc_ratios",
    "TimingStats", "time_fit", "time_predict", "time_predict_interleaved", "timed_fit",
]
