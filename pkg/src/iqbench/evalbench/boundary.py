"""Prediction lattices over the IQ plane for decision-boundary backgrounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoundaryGrid:
    i_values: np.ndarray          # (resolution,)
    q_values: np.ndarray          # (resolution,)
    labels: np.ndarray            # (resolution, resolution), row r <-> q_values[r]
    proba: np.ndarray | None = None

    def lattice(self) -> np.ndarray:
        """Row-major lattice points, i varying fastest."""
        ii, qq = np.meshgrid(self.i_values, self.q_values)
        return np.column_stack([ii.ravel(), qq.ravel()])


def bbox_from_points(points, margin: float = 0.1):
    """Data extent padded by ``margin`` of its width on every side."""
    pts = np.asarray(points, dtype=np.float64)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    pad = margin * np.where(hi > lo, hi - lo, 1.0)
    return (float(lo[0] - pad[0]), float(lo[1] - pad[1]), float(hi[0] + pad[0]), float(hi[1] + pad[1]))


def boundary_grid(model, bbox, resolution: int = 100) -> BoundaryGrid:
    """Predict on an evenly spaced ``resolution x resolution`` lattice.

    ``bbox`` is ``(i_min, q_min, i_max, q_max)``; the lattice includes its
    corners.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    i_min, q_min, i_max, q_max = bbox
    i_values = np.linspace(i_min, i_max, resolution)
    q_values = np.linspace(q_min, q_max, resolution)
    grid = BoundaryGrid(i_values, q_values, np.empty((0, 0)))
    pts = grid.lattice()
    labels = np.asarray(model.predict(pts)).reshape(resolution, resolution).astype(np.int8)
    proba = None
    if getattr(model, "supports_proba", False):
        proba = np.asarray(model.predict_proba(pts)).reshape(resolution, resolution)
    return BoundaryGrid(i_values, q_values, labels, proba)
