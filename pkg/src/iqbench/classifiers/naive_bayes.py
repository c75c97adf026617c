"""Gaussian naive Bayes over the two IQ coordinates."""

from __future__ import annotations

import numpy as np

from .base import Kind, Model, P, real, register, sigmoid


class GaussianNB(Model):
    kind = Kind.NAIVE_BAYES

    def __init__(self, means, variances, priors):
        self.means = np.asarray(means, dtype=np.float64)          # (2 classes, 2 features)
        self.variances = np.asarray(variances, dtype=np.float64)
        self.priors = np.asarray(priors, dtype=np.float64)

    def joint_log_likelihood(self, X):
        out = np.empty((X.shape[0], 2))
        for c in range(2):
            var = self.variances[c]
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * var))
            ll = ll - 0.5 * np.sum((X - self.means[c]) ** 2 / var, axis=1)
            out[:, c] = np.log(self.priors[c]) + ll
        return out

    def decision_function(self, X):
        """Log posterior odds of excited versus ground."""
        jll = self.joint_log_likelihood(X)
        return jll[:, 1] - jll[:, 0]

    def predict_proba(self, X):
        return sigmoid(self.decision_function(X))

    def to_payload(self):
        return {"means": self.means.tolist(), "variances": self.variances.tolist(),
                "priors": self.priors.tolist()}

    @classmethod
    def from_payload(cls, p):
        return cls(p["means"], p["variances"], p["priors"])


def fit_naive_bayes(X, y, var_smoothing=1e-9, seed=0) -> GaussianNB:
    """Per-class feature means and (biased) variances with empirical priors.

    Every variance is floored by ``var_smoothing`` times the largest global
    feature variance so that a class made of duplicated points stays usable.
    """
    floor = var_smoothing * float(np.max(X.var(axis=0)))
    means = np.empty((2, X.shape[1]))
    variances = np.empty((2, X.shape[1]))
    priors = np.empty(2)
    for c in range(2):
        Xc = X[y == c]
        means[c] = Xc.mean(axis=0)
        variances[c] = Xc.var(axis=0) + floor
        priors[c] = len(Xc) / len(X)
    return GaussianNB(means, variances, priors)


register(Kind.NAIVE_BAYES, {"var_smoothing": P(1e-9, real(0, None), float)},
         fit_naive_bayes, GaussianNB)
