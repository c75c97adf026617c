"""AdaBoost over decision stumps, discrete (SAMME) and real (SAMME.R).

Round bookkeeping, for a stump with weighted error eps:

* SAMME: vote weight ``alpha = learning_rate * ln((1 - eps) / eps)``;
  misclassified weights are multiplied by ``exp(alpha)``.
* SAMME.R: each stump votes ``learning_rate * 0.5 * ln(p1 / p0)`` from its
  leaf class frequencies; weights are multiplied by ``exp(-y * vote)`` with
  ``y`` in {-1, +1}.

Early stopping: a round with ``eps >= 0.5`` is discarded and training
stops; a round with ``eps == 0`` is a perfect training classifier, so the
ensemble is replaced by that stump alone and training stops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Kind, Model, P, choice, integer, real, register, sigmoid

# Hard bounds on the ensemble size; Table-1 style searches use [10, 200].
N_ESTIMATORS_BOUNDS = (10, 200)
PROBA_CLIP = np.finfo(np.float64).eps


@dataclass(frozen=True)
class Stump:
    feature: int
    threshold: float
    left_p1: float     # weighted excited fraction for x[feature] <= threshold
    right_p1: float

    def predict(self, X):
        return np.where(X[:, self.feature] <= self.threshold,
                        int(self.left_p1 > 0.5), int(self.right_p1 > 0.5)).astype(np.int8)


def gini_impurity(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    return 1.0 - float(np.sum((counts / total) ** 2))


def split_threshold(lo, hi):
    """Midpoint of two consecutive distinct values that still separates them."""
    mid = 0.5 * (lo + hi)
    return lo if mid >= hi else mid


def fit_stump(X, y, w, orders=None) -> Stump:
    """Weighted-gini decision stump.

    Candidate thresholds are midpoints of consecutive distinct values; ties
    in impurity go to the lower feature index, then the lower threshold.
    """
    n, d = X.shape
    y1 = (y == 1)
    w1 = np.where(y1, w, 0.0)
    w0 = w - w1
    t1, t0 = w1.sum(), w0.sum()
    best = None
    for f in range(d):
        order = orders[f] if orders is not None else np.argsort(X[:, f], kind="stable")
        xv = X[order, f]
        valid = np.flatnonzero(xv[:-1] < xv[1:])
        if valid.size == 0:
            continue
        l1 = np.cumsum(w1[order])[valid]
        l0 = np.cumsum(w0[order])[valid]
        r1, r0 = t1 - l1, t0 - l0
        wl, wr = l1 + l0, r1 + r0
        with np.errstate(divide="ignore", invalid="ignore"):
            imp = (wl - (l1 * l1 + l0 * l0) / wl) + (wr - (r1 * r1 + r0 * r0) / wr)
        imp = np.where((wl > 0) & (wr > 0), imp, np.inf)
        k = int(np.argmin(imp))
        if not np.isfinite(imp[k]):
            continue
        if best is None or imp[k] < best[0]:
            pos = valid[k]
            best = (imp[k], f, split_threshold(xv[pos], xv[pos + 1]),
                    l1[k] / wl[k], r1[k] / wr[k])
    if best is None:
        p1 = t1 / (t1 + t0)
        return Stump(0, np.inf, p1, p1)
    _, f, thr, lp, rp = best
    return Stump(f, float(thr), float(lp), float(rp))


class AdaBoost(Model):
    kind = Kind.ADABOOST

    def __init__(self, stumps, votes, algorithm, errors, norms, info=None):
        """``votes[t]`` is the (left, right) contribution of stump ``t`` to the score."""
        self.stumps = list(stumps)
        self.votes = np.asarray(votes, dtype=np.float64).reshape(-1, 2)
        self.algorithm = algorithm
        self.errors = list(errors)
        self.norms = list(norms)
        self.info = info or {}
        self._feat = np.array([s.feature for s in self.stumps], dtype=np.intp)
        self._thr = np.array([s.threshold for s in self.stumps], dtype=np.float64)

    def decision_function(self, X):
        if not self.stumps:
            return np.zeros(X.shape[0])
        left = X[:, self._feat] <= self._thr
        return np.where(left, self.votes[:, 0], self.votes[:, 1]).sum(axis=1)

    def predict_proba(self, X):
        f = self.decision_function(X)
        if self.algorithm == "SAMME":
            total = float(np.abs(self.votes).max(axis=1).sum()) if len(self.votes) else 1.0
            return sigmoid(2.0 * f / total)
        return sigmoid(2.0 * f)

    def training_error_bound(self) -> float:
        """Freund-Schapire product ``prod 2 sqrt(eps (1 - eps))`` over kept rounds."""
        e = np.asarray(self.errors)
        return float(np.prod(2.0 * np.sqrt(e * (1.0 - e))))

    def normalizer_bound(self) -> float:
        """``prod Z_t``: bounds the training error for any vote weights."""
        return float(np.prod(self.norms))

    def metadata(self):
        return {"algorithm": self.algorithm, "n_rounds": len(self.stumps), **self.info}

    def to_payload(self):
        return {"algorithm": self.algorithm,
                "stumps": [[s.feature, s.threshold, s.left_p1, s.right_p1] for s in self.stumps],
                "votes": self.votes.tolist(), "errors": self.errors, "norms": self.norms,
                "info": self.info}

    @classmethod
    def from_payload(cls, p):
        stumps = [Stump(int(f), float(t), float(a), float(b)) for f, t, a, b in p["stumps"]]
        return cls(stumps, p["votes"], p["algorithm"], p["errors"], p["norms"], p.get("info"))


def fit_adaboost(X, y, n_estimators=50, learning_rate=1.0, algorithm="SAMME", seed=0) -> AdaBoost:
    n = X.shape[0]
    ys = np.where(y == 1, 1.0, -1.0)
    w = np.full(n, 1.0 / n)
    orders = [np.argsort(X[:, f], kind="stable") for f in range(X.shape[1])]
    stumps, votes, errors, norms = [], [], [], []
    stop = "max_rounds"
    for _ in range(n_estimators):
        stump = fit_stump(X, y, w, orders)
        pred = stump.predict(X)
        miss = pred != y
        eps = float(np.sum(w[miss]) / np.sum(w))
        if eps <= 0.0:
            if algorithm == "SAMME":
                vote = (-1.0 if stump.left_p1 <= 0.5 else 1.0, -1.0 if stump.right_p1 <= 0.5 else 1.0)
            else:
                vote = tuple(learning_rate * _half_logit(p) for p in (stump.left_p1, stump.right_p1))
            stumps, votes, errors, norms = [stump], [vote], [0.0], [0.0]
            stop = "perfect_stump"
            break
        if eps >= 0.5:
            stop = "weak_learner_failed"
            break
        if algorithm == "SAMME":
            alpha = learning_rate * np.log((1.0 - eps) / eps)
            sign = lambda p: 1.0 if p > 0.5 else -1.0
            vote = (alpha * sign(stump.left_p1), alpha * sign(stump.right_p1))
            # SAMME's exp(alpha * miss) equals exp(-(alpha/2) y h) up to normalisation
            beta = 0.5 * alpha
            norm = (1.0 - eps) * np.exp(-beta) + eps * np.exp(beta)
            w = w * np.exp(alpha * miss)
        else:
            vote = tuple(learning_rate * _half_logit(p) for p in (stump.left_p1, stump.right_p1))
            h = np.where(X[:, stump.feature] <= stump.threshold, vote[0], vote[1])
            factor = np.exp(-ys * h)
            norm = float(np.sum(w * factor) / np.sum(w))
            w = w * factor
        w = w / w.sum()
        stumps.append(stump)
        votes.append(vote)
        errors.append(eps)
        norms.append(float(norm))
    return AdaBoost(stumps, votes, algorithm, errors, norms, {"stop_reason": stop})


def _half_logit(p1):
    p1 = min(max(p1, PROBA_CLIP), 1.0 - PROBA_CLIP)
    return 0.5 * float(np.log(p1 / (1.0 - p1)))


register(Kind.ADABOOST, {
    "n_estimators": P(50, integer(*N_ESTIMATORS_BOUNDS)),
    "learning_rate": P(1.0, real(0, 1, lo_open=True), float),
    "algorithm": P("SAMME", choice("SAMME", "SAMME.R")),
}, fit_adaboost, AdaBoost)
