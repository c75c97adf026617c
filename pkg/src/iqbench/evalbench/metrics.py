"""Confusion counts, ROC curves, AUC and k-fold cross-validation.

Excited (label 1) is the positive class everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..classifiers import fit as default_fit
from ..errors import EmptyTestSet, FoldMissingClass, SingleClass
from ..iqcore import Dataset


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n

    @property
    def tpr(self) -> float:
        pos = self.tp + self.fn
        return self.tp / pos if pos else 0.0

    @property
    def fpr(self) -> float:
        neg = self.fp + self.tn
        return self.fp / neg if neg else 0.0


def confusion(y_true, y_pred) -> ConfusionCounts:
    y_true = np.asarray(y_true).astype(bool)
    y_pred = np.asarray(y_pred).astype(bool)
    if y_true.size == 0:
        raise EmptyTestSet("no shots to evaluate")
    return ConfusionCounts(tp=int(np.sum(y_true & y_pred)), fp=int(np.sum(~y_true & y_pred)),
                           tn=int(np.sum(~y_true & ~y_pred)), fn=int(np.sum(y_true & ~y_pred)))


def evaluate(model, test: Dataset) -> tuple[ConfusionCounts, float]:
    if len(test) == 0:
        raise EmptyTestSet("test set is empty")
    counts = confusion(test.labels, model.predict(test.points))
    return counts, counts.accuracy


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    n_pos: int = 0
    n_neg: int = 0

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist(), self.thresholds.tolist()))

    def validate(self):
        if self.fpr[0] != 0 or self.tpr[0] != 0 or self.fpr[-1] != 1 or self.tpr[-1] != 1:
            raise ValueError("ROC curve must run from (0, 0) to (1, 1)")
        if np.any(np.diff(self.fpr) < 0) or np.any(np.diff(self.tpr) < 0):
            raise ValueError("ROC curve must be non-decreasing in both rates")


def roc(scores, labels) -> RocCurve:
    """Empirical ROC; a shot counts as positive when ``score >= threshold``.

    Thresholds are the distinct scores in descending order, preceded by +inf
    (nothing positive). Equal scores move the curve in a single diagonal step.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both excited and ground shots")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    lab = labels[order]
    tp = np.cumsum(lab)
    fp = np.cumsum(~lab)
    last = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tp = np.r_[0, tp[last]]
    fp = np.r_[0, fp[last]]
    thr = np.r_[np.inf, s[last]]
    return RocCurve(fp / n_neg, tp / n_pos, thr, n_pos, n_neg)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the curve.

    Rebuilding the integer counts from the rates keeps the sum exact, so the
    result equals the Mann-Whitney statistic for empirical curves.
    """
    curve.validate()
    if curve.n_pos and curve.n_neg:
        tp = np.rint(curve.tpr * curve.n_pos).astype(np.int64)
        fp = np.rint(curve.fpr * curve.n_neg).astype(np.int64)
        twice = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
        return twice / (2.0 * curve.n_pos * curve.n_neg)
    return float(np.sum(np.diff(curve.fpr) * (curve.tpr[1:] + curve.tpr[:-1])) / 2.0)


def mann_whitney_auc(scores, labels) -> float:
    """``P(s_e > s_g) + 1/2 P(s_e == s_g)`` by sorting and rank sums."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    ranks = rankdata(scores)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Shuffled partition of ``range(n)`` into ``k`` folds differing in size by at most one."""
    if k < 2 or k > n:
        raise ValueError(f"k must lie in [2, {n}], got {k}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


@dataclass(frozen=True)
class CVResult:
    fold_accuracies: tuple
    mean: float
    std: float


def kfold_cv(spec, data: Dataset, k: int = 5, seed: int = 0, fit_fn=None) -> CVResult:
    """Accuracy on each held-out fold after training on the other ``k - 1``.

    Every training complement must contain both classes; a held-out fold may
    be single-class (leave-one-out is allowed).
    """
    fit_fn = fit_fn or default_fit
    folds = kfold_indices(len(data), k, seed)
    accs = []
    for i, val_idx in enumerate(folds):
        train_idx = np.concatenate([f for j, f in enumerate(folds) if j != i])
        train = data.subset(train_idx)
        counts = train.class_counts()
        if min(counts.values()) == 0:
            raise FoldMissingClass(f"training part of fold {i} lacks a class: {dict(counts)}")
        model = fit_fn(spec, train)
        _, acc = evaluate(model, data.subset(val_idx))
        accs.append(acc)
    accs = np.asarray(accs)
    return CVResult(tuple(float(a) for a in accs), float(accs.mean()), float(accs.std()))
