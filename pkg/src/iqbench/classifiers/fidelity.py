"""Centroid-axis threshold discriminator.

Training projects every shot onto the unit vector joining the ground and
excited centroids and places the threshold where the empirical CDFs of the
two projected classes are furthest apart. This is the rule that maximises
the assignment fidelity ``1 - (P(e|g) + P(g|e)) / 2`` along that axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateCentroids
from .base import Kind, Model, register


@dataclass(frozen=True)
class FidelityFitParams:
    axis: tuple[float, float]
    threshold: float
    orientation: int = 1


def cdf_gap_candidates(proj_g: np.ndarray, proj_e: np.ndarray):
    """All candidate thresholds and ``|CDF_g - CDF_e|`` at each of them.

    Candidates are the midpoints between consecutive distinct projection
    values plus -inf and +inf. Counts are taken by position in the sorted
    merge, so a midpoint that rounds onto a neighbour cannot miscount.
    """
    values = np.concatenate([proj_g, proj_e])
    is_e = np.concatenate([np.zeros(len(proj_g), bool), np.ones(len(proj_e), bool)])
    order = np.argsort(values, kind="stable")
    v = values[order]
    e_sorted = is_e[order]
    cum_e = np.cumsum(e_sorted)
    cum_g = np.arange(1, len(v) + 1) - cum_e
    # last index of each run of equal values
    ends = np.flatnonzero(np.diff(v) > 0)
    lo, hi = v[ends], v[ends + 1]
    mid = 0.5 * (lo + hi)
    mid = np.where(mid < hi, mid, lo)     # adjacent doubles: keep hi on the upper side
    thresholds = np.concatenate([[-np.inf], mid, [np.inf]])
    n_g, n_e = len(proj_g), len(proj_e)
    cg = np.concatenate([[0], cum_g[ends], [n_g]]).astype(np.int64)
    ce = np.concatenate([[0], cum_e[ends], [n_e]]).astype(np.int64)
    # exact integer numerators over one denominator, so equal gaps stay equal
    return thresholds, np.abs(cg * n_e - ce * n_g) / (n_g * n_e)


def fit_fidelity_params(X: np.ndarray, y: np.ndarray) -> FidelityFitParams:
    c_g = X[y == 0].mean(axis=0)
    c_e = X[y == 1].mean(axis=0)
    diff = c_e - c_g
    norm = float(np.hypot(diff[0], diff[1]))
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateCentroids("ground and excited centroids coincide")
    axis = diff / norm
    proj = X @ axis
    thresholds, gap = cdf_gap_candidates(proj[y == 0], proj[y == 1])
    # argmax picks the lowest threshold among equal gaps
    best = int(np.argmax(gap))
    # the axis points from ground to excited, so excited projects higher
    orientation = 1 if proj[y == 1].mean() >= proj[y == 0].mean() else -1
    return FidelityFitParams((float(axis[0]), float(axis[1])), float(thresholds[best]), orientation)


class FidelityFit(Model):
    kind = Kind.FIDELITY_FIT
    supports_proba = False

    def __init__(self, params: FidelityFitParams):
        self.params = params
        self._w = params.orientation * np.array(params.axis)
        self._t = params.orientation * params.threshold

    def decision_function(self, X):
        """Signed margin ``orientation * (projection - threshold)``."""
        return X @ self._w - self._t

    def predict(self, X):
        return (X @ self._w > self._t).astype(np.int8)

    def metadata(self):
        return {"orientation": self.params.orientation}

    def to_payload(self):
        p = self.params
        return {"axis": list(p.axis), "threshold": p.threshold, "orientation": p.orientation}

    @classmethod
    def from_payload(cls, payload):
        return cls(FidelityFitParams(tuple(payload["axis"]), float(payload["threshold"]),
                                     int(payload["orientation"])))


def fit_fidelity(X, y, seed=0) -> FidelityFit:
    return FidelityFit(fit_fidelity_params(X, y))


register(Kind.FIDELITY_FIT, {}, fit_fidelity, FidelityFit)
