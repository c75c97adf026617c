"""Random forest of fully grown CART trees on bootstrap resamples."""

from __future__ import annotations

import math

import numpy as np

from . import _tree
from .base import Kind, Model, P, choice, flag, integer, register

CRITERIA = {"gini": _tree.GINI, "entropy": _tree.ENTROPY, "log_loss": _tree.ENTROPY}


def n_split_features(max_features: str, n_features: int) -> int:
    if max_features == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(math.log2(n_features)))
    return n_features


def impurity(counts, criterion="gini") -> float:
    c = np.asarray(counts, dtype=np.float64)
    return float(_tree._impurity(c[0], c[1], CRITERIA[criterion]))


class RandomForest(Model):
    kind = Kind.RANDOM_FOREST

    def __init__(self, trees, info=None):
        """``trees`` is a list of (feature, threshold, left, right, value) arrays."""
        self.trees = [tuple(np.asarray(a) for a in t) for t in trees]
        self.info = info or {}
        sizes = [len(t[0]) for t in self.trees]
        self._roots = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        offs = self._roots
        self._feature = np.concatenate([t[0] for t in self.trees]).astype(np.int32)
        self._threshold = np.concatenate([t[1] for t in self.trees]).astype(np.float64)
        self._left = np.concatenate([np.where(t[2] >= 0, t[2] + o, -1)
                                     for t, o in zip(self.trees, offs)]).astype(np.int32)
        self._right = np.concatenate([np.where(t[3] >= 0, t[3] + o, -1)
                                      for t, o in zip(self.trees, offs)]).astype(np.int32)
        # a leaf votes excited on a strict weighted majority
        self._vote = (np.concatenate([t[4] for t in self.trees]) > 0.5).astype(np.float64)

    @property
    def n_nodes(self) -> int:
        return len(self._feature)

    def predict_proba(self, X):
        return _tree.vote_fraction(np.ascontiguousarray(X), self._roots, self._feature,
                                   self._threshold, self._left, self._right, self._vote)

    def decision_function(self, X):
        return self.predict_proba(X) - 0.5

    def metadata(self):
        return {"n_nodes": self.n_nodes, **self.info}

    def to_payload(self):
        return {"trees": [[a.tolist() for a in t] for t in self.trees], "info": self.info}

    @classmethod
    def from_payload(cls, p):
        trees = [(np.array(f, np.int32), np.array(t, np.float64), np.array(l, np.int32),
                  np.array(r, np.int32), np.array(v, np.float64)) for f, t, l, r, v in p["trees"]]
        return cls(trees, p.get("info"))


def fit_random_forest(X, y, n_estimators=100, criterion="gini", max_features="sqrt",
                      bootstrap=True, seed=0) -> RandomForest:
    """Each tree gets its own generator spawned from ``seed``, so trees are
    independent of build order and could be grown in parallel."""
    n, d = X.shape
    X = np.ascontiguousarray(X, dtype=np.float64)
    y64 = y.astype(np.int64)
    k = n_split_features(max_features, d)
    crit = CRITERIA[criterion]
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_estimators):
        rng = np.random.default_rng(child)
        if bootstrap:
            w = np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64)
        else:
            w = np.ones(n)
        rand = rng.random((2 * n + 1, d))
        trees.append(_tree.build_tree(X, y64, w, crit, k, rand))
    return RandomForest(trees, {"max_features_per_split": k})


register(Kind.RANDOM_FOREST, {
    "n_estimators": P(100, integer(1, 10_000)),
    "criterion": P("gini", choice("gini", "entropy", "log_loss")),
    "max_features": P("sqrt", choice("sqrt", "log2", "all")),
    "bootstrap": P(True, flag()),
}, fit_random_forest, RandomForest)
