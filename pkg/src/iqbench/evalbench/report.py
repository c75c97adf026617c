"""Benchmark tables, ROC / boundary CSVs and SVG figures.

CSV schemas (all floats written with 17 significant digits, LF endings):

``report.csv``
    ``Name,Accuracy,Test Time (µs),Train Time (s),True Positive Rate,False Positive Rate,AUC``
``roc_<model>.csv``
    ``fpr,tpr,threshold``; the first threshold is ``inf``.
``roc_ratio.csv``
    ``fpr`` followed by one column per model holding ``TPR_model / TPR_baseline``
    on an evenly spaced FPR grid; ``0/0`` is taken as 1.
``grid_<model>.csv``
    ``i,q,label`` plus ``proba`` when the model supports it, row-major with
    ``i`` varying fastest.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ReportValidationError
from . import svg

REPORT_COLUMNS = ("Name", "Accuracy", "Test Time (µs)", "Train Time (s)",
                  "True Positive Rate", "False Positive Rate", "AUC")
_FIELDS = ("accuracy", "test_time_us_per_shot", "train_time_s", "tpr", "fpr", "auc")
BASELINE = "Ada Boost"
RATIO_POINTS = 101

MEASUREMENT_NOTES = (
    "Positive class: Excited (|1>).",
    "Test time: scoring only (batch predict over the full test split, median, "
    "microseconds per shot); no data transfer.",
    "True/False Positive Rate: from each model's predicted labels.",
    "AUC: trapezoidal area under the empirical ROC of probabilities, or of the "
    "signed projection margin for Fidelity Fit.",
)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class BenchmarkRecord:
    name: str
    accuracy: float
    test_time_us_per_shot: float
    train_time_s: float
    tpr: float
    fpr: float
    auc: float
    environment: dict = field(default_factory=dict, compare=False)

    def validate(self):
        for f in ("accuracy", "tpr", "fpr", "auc"):
            v = getattr(self, f)
            if not (0.0 <= v <= 1.0):
                raise ReportValidationError(f"{self.name}: {f}={v} outside [0, 1]")
        for f in ("test_time_us_per_shot", "train_time_s"):
            v = getattr(self, f)
            if not (v >= 0.0 and math.isfinite(v)):
                raise ReportValidationError(f"{self.name}: {f}={v} must be a finite non-negative time")

    def row(self) -> list[str]:
        return [self.name] + [fmt(getattr(self, f)) for f in _FIELDS]


def slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def report_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def parse_report_csv(text: str) -> list[BenchmarkRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != REPORT_COLUMNS:
        raise ReportValidationError(f"unexpected report header: {rows[0] if rows else None}")
    return [BenchmarkRecord(r[0], *(float(v) for v in r[1:])) for r in rows[1:]]


def report_markdown(records, environment=None) -> str:
    lines = ["# Readout discrimination benchmark", "",
             "| " + " | ".join(REPORT_COLUMNS) + " |",
             "|" + "|".join(["---"] + ["---:"] * (len(REPORT_COLUMNS) - 1)) + "|"]
    for r in records:
        lines.append(f"| {r.name} | {r.accuracy:.3f} | {r.test_time_us_per_shot:.3f} | "
                     f"{r.train_time_s:.3f} | {r.tpr:.3f} | {r.fpr:.3f} | {r.auc:.4f} |")
    lines += ["", "Full-precision values are in `report.csv`.", "", "## Measurement notes", ""]
    lines += [f"- {n}" for n in MEASUREMENT_NOTES]
    if environment:
        lines += ["", "## Environment", "", "```json",
                  json.dumps(environment, indent=2, sort_keys=True, default=str), "```"]
    return "\n".join(lines) + "\n"


def roc_csv(curve) -> str:
    lines = ["fpr,tpr,threshold"]
    lines += [f"{fmt(f)},{fmt(t)},{fmt(h)}" for f, t, h in zip(curve.fpr, curve.tpr, curve.thresholds)]
    return "\n".join(lines) + "\n"


def interpolate_tpr(curve, fpr_grid) -> np.ndarray:
    """Upper envelope of the ROC at each FPR: the best TPR reachable without
    exceeding that false-positive rate (vertical steps take their top)."""
    fpr = np.asarray(curve.fpr)
    tpr = np.asarray(curve.tpr)
    idx = np.searchsorted(fpr, fpr_grid, side="right") - 1
    out = tpr[idx].astype(np.float64)
    # inside a diagonal segment (tied scores) interpolate linearly
    nxt = np.minimum(idx + 1, len(fpr) - 1)
    span = fpr[nxt] - fpr[idx]
    inside = (span > 0) & (fpr_grid > fpr[idx])
    frac = np.where(inside, (fpr_grid - fpr[idx]) / np.where(span > 0, span, 1.0), 0.0)
    return np.where(inside, out + frac * (tpr[nxt] - out), out)


def roc_ratios(curves: dict, baseline: str = BASELINE, points: int = RATIO_POINTS):
    """TPR of every curve divided by the baseline's TPR on a common FPR grid."""
    grid = np.linspace(0.0, 1.0, points)
    base = interpolate_tpr(curves[baseline], grid)
    ratios = {}
    for name, c in curves.items():
        t = interpolate_tpr(c, grid)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(base > 0, t / np.where(base > 0, base, 1.0), np.where(t > 0, np.inf, 1.0))
        ratios[name] = r
    return grid, ratios


def ratio_csv(grid, ratios: dict) -> str:
    names = list(ratios)
    lines = [",".join(["fpr"] + [n.replace(",", " ") for n in names])]
    for k, f in enumerate(grid):
        lines.append(",".join([fmt(f)] + [fmt(ratios[n][k]) for n in names]))
    return "\n".join(lines) + "\n"


def grid_csv(grid) -> str:
    pts = grid.lattice()
    labels = grid.labels.ravel()
    has_p = grid.proba is not None
    lines = ["i,q,label,proba" if has_p else "i,q,label"]
    proba = grid.proba.ravel() if has_p else None
    for k, (i, q) in enumerate(pts):
        row = f"{fmt(i)},{fmt(q)},{int(labels[k])}"
        if has_p:
            row += f",{fmt(proba[k])}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def render_report(records, curves=None, grids=None, out_dir=".", environment=None,
                  test_points=None, test_labels=None, baseline: str = BASELINE) -> list[Path]:
    """Write the report bundle into ``out_dir`` and return the written paths.

    ``curves`` and ``grids`` map record names to a ``RocCurve`` and a
    ``BoundaryGrid``. Every record is validated before any file is touched.
    """
    records = list(records)
    if not records:
        raise ReportValidationError("no benchmark records to report")
    for r in records:
        r.validate()
    names = [r.name for r in records]
    if len(set(names)) != len(names) or len({slug(n) for n in names}) != len(names):
        raise ReportValidationError(f"record names must be unique: {names}")
    curves = dict(curves or {})
    grids = dict(grids or {})
    unknown = (set(curves) | set(grids)) - set(names)
    if unknown:
        raise ReportValidationError(f"curves or grids for unknown models: {sorted(unknown)}")
    for name, c in curves.items():
        try:
            c.validate()
        except ValueError as exc:
            raise ReportValidationError(f"{name}: {exc}") from exc

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(fname, text):
        p = out / fname
        _write(p, text)
        written.append(p)

    emit("report.csv", report_csv(records))
    emit("report.md", report_markdown(records, environment))
    if environment is not None:
        emit("environment.json", json.dumps(environment, indent=2, sort_keys=True, default=str) + "\n")

    ordered = {n: curves[n] for n in names if n in curves}
    for name, c in ordered.items():
        emit(f"roc_{slug(name)}.csv", roc_csv(c))
    fgrid, ratios = None, None
    if baseline in ordered:
        fgrid, ratios = roc_ratios(ordered, baseline)
        emit("roc_ratio.csv", ratio_csv(fgrid, ratios))
    if ordered:
        auc_of = {r.name: r.auc for r in records}
        emit("roc.svg", svg.roc_svg({n: (c.fpr, c.tpr, auc_of[n]) for n, c in ordered.items()},
                                    fgrid, ratios, baseline))
    for name in names:
        if name in grids:
            g = grids[name]
            emit(f"grid_{slug(name)}.csv", grid_csv(g))
            emit(f"boundaries_{slug(name)}.svg", svg.boundary_svg(g, name, test_points, test_labels))
    return written
