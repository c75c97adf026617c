"""Linear and RBF support vector machines trained with SMO.

Both report probabilities through a slope-only Platt sigmoid
``P(excited | x) = 1 / (1 + exp(-A f(x)))`` fitted on the training decision
values. Dropping Platt's offset keeps ``proba > 0.5`` identical to the
hyperplane sign rule.
"""

from __future__ import annotations

import numpy as np

from ..errors import NonConvergence
from . import _smo
from .base import Kind, Model, P, choice, integer, real, register, sigmoid, to_signed

MAX_ITER = 100_000
TOL = 1e-6


def rbf_kernel(A, B, gamma):
    """``exp(-gamma * |a - b|^2)`` for every row pair of A and B."""
    sq = (np.einsum("ij,ij->i", A, A)[:, None] + np.einsum("ij,ij->i", B, B)[None, :]
          - 2.0 * (A @ B.T))
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def resolve_gamma(gamma, X):
    if gamma == "scale":
        var = float(X.var())
        return 1.0 / (X.shape[1] * var) if var > 0 else 1.0
    return float(gamma)


def fit_platt_slope(f, y, max_iter=100):
    """Maximum-likelihood slope A of ``sigmoid(A f)`` with Platt's target smoothing."""
    n_pos = int(np.sum(y == 1))
    n_neg = len(y) - n_pos
    t = np.where(y == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    def nll(a):
        z = a * f
        # log(1 + exp(z)) - t z, written stably
        return float(np.sum(np.logaddexp(0.0, z) - t * z))

    a = 1.0
    cur = nll(a)
    for _ in range(max_iter):
        p = sigmoid(a * f)
        g = float(np.sum((p - t) * f))
        h = float(np.sum(p * (1 - p) * f * f)) + 1e-12
        step = g / h
        lam = 1.0
        while lam > 1e-10:
            cand = a - lam * step
            val = nll(cand)
            if val <= cur:
                break
            lam *= 0.5
        else:
            break
        done = abs(cand - a) < 1e-12 * max(1.0, abs(a))
        a, cur = cand, val
        if done:
            break
    # a non-positive slope would invert the ordering; keep the sigmoid increasing
    return max(a, 1e-8)


def solve_dual(K, y_signed, C, tol=TOL, max_iter=MAX_ITER, kind="svm"):
    alpha, rho, n_iter, converged, gap = _smo.smo(np.ascontiguousarray(K), y_signed,
                                                   float(C), float(tol), int(max_iter))
    if not converged:
        raise NonConvergence(kind, f"KKT gap {gap:.3g} > {tol:g} after {n_iter} SMO iterations")
    return alpha, -rho, n_iter, gap


class LinearSVM(Model):
    kind = Kind.LINEAR_SVM

    def __init__(self, w, b, platt_a, info=None):
        self.w = np.asarray(w, dtype=np.float64)
        self.b = float(b)
        self.platt_a = float(platt_a)
        self.info = info or {}

    def decision_function(self, X):
        return X @ self.w + self.b

    def predict_proba(self, X):
        return sigmoid(self.platt_a * self.decision_function(X))

    def metadata(self):
        return {"platt": "slope-only", **self.info}

    def to_payload(self):
        return {"w": self.w.tolist(), "b": self.b, "platt_a": self.platt_a, "info": self.info}

    @classmethod
    def from_payload(cls, p):
        return cls(p["w"], p["b"], p["platt_a"], p.get("info"))


def fit_linear_svm(X, y, C=1.0, tol=TOL, max_iter=MAX_ITER, seed=0) -> LinearSVM:
    """Soft-margin linear SVM, ``min 1/2 |w|^2 + C sum hinge``."""
    ys = to_signed(y)
    K = X @ X.T
    alpha, b, n_iter, gap = solve_dual(K, ys, C, tol, max_iter, "linear_svm")
    w = (alpha * ys) @ X
    a = fit_platt_slope(X @ w + b, y)
    return LinearSVM(w, b, a, {"smo_iterations": int(n_iter), "kkt_gap": float(gap),
                               "n_support": int(np.count_nonzero(alpha))})


class RbfSVM(Model):
    kind = Kind.RBF_SVM

    def __init__(self, support, coef, b, gamma, platt_a, info=None):
        self.support = np.asarray(support, dtype=np.float64).reshape(-1, 2)
        self.coef = np.asarray(coef, dtype=np.float64)
        self.b = float(b)
        self.gamma = float(gamma)
        self.platt_a = float(platt_a)
        self.info = info or {}

    def decision_function(self, X):
        return rbf_kernel(X, self.support, self.gamma) @ self.coef + self.b

    def predict_proba(self, X):
        return sigmoid(self.platt_a * self.decision_function(X))

    def metadata(self):
        return {"platt": "slope-only", "gamma": self.gamma, **self.info}

    def to_payload(self):
        return {"support": self.support.tolist(), "coef": self.coef.tolist(), "b": self.b,
                "gamma": self.gamma, "platt_a": self.platt_a, "info": self.info}

    @classmethod
    def from_payload(cls, p):
        return cls(p["support"], p["coef"], p["b"], p["gamma"], p["platt_a"], p.get("info"))


def fit_rbf_svm(X, y, C=1.0, gamma="scale", degree=3, tol=TOL, max_iter=MAX_ITER,
                seed=0) -> RbfSVM:
    """Kernel SVM with ``K(x, x') = exp(-gamma |x - x'|^2)``.

    ``degree`` has no effect on an RBF kernel; it is accepted so that the
    published search space can be replayed and is echoed in the metadata.
    """
    ys = to_signed(y)
    g = resolve_gamma(gamma, X)
    K = rbf_kernel(X, X, g)
    alpha, b, n_iter, gap = solve_dual(K, ys, C, tol, max_iter, "rbf_svm")
    sv = alpha > 0
    coef = alpha[sv] * ys[sv]
    f = K[:, sv] @ coef + b
    a = fit_platt_slope(f, y)
    return RbfSVM(X[sv], coef, b, g, a, {"smo_iterations": int(n_iter), "kkt_gap": float(gap),
                                         "n_support": int(sv.sum()), "degree_inert": degree})


_common = {
    "tol": P(TOL, real(0, None, lo_open=True)),
    "max_iter": P(MAX_ITER, integer(1, 10**9)),
}
register(Kind.LINEAR_SVM, {"C": P(1.0, real(0, None, lo_open=True), float), **_common},
         fit_linear_svm, LinearSVM)
register(Kind.RBF_SVM, {
    "C": P(1.0, real(0, None, lo_open=True), float),
    "gamma": P("scale", real(0, None, lo_open=True, allow=("scale",))),
    "degree": P(3, choice(2, 3, 4)),
    **_common,
}, fit_rbf_svm, RbfSVM)
