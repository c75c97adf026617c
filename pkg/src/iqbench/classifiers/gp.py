"""Binary Gaussian-process classifier with a logistic link, Laplace approximation.

The latent function has a zero-mean GP prior with covariance
``s2 * exp(-gamma |x - x'|^2)``. Training finds the mode of

    Psi(f) = log p(y | f) - 1/2 f' K^-1 f

by Newton's method written in terms of ``B = I + W^1/2 K W^1/2`` (which is
well conditioned) and the representer weights ``a`` with ``f = K a``, so
``K^-1`` is never formed and the gradient is ``(t - sigmoid(f)) - a``.

The predictive class probability averages the logistic over the Gaussian
latent predictive. Two schemes are available and the choice is recorded in
the model metadata:

* ``"probit"``: ``sigmoid(mu / sqrt(1 + pi var / 8))`` (MacKay's closed form);
* ``"quadrature"``: 64-node Gauss-Hermite.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular

from ..errors import CholeskyFailure, NonConvergence
from .base import Kind, Model, P, choice, integer, real, register, sigmoid
from .svm import rbf_kernel, resolve_gamma

GRAD_TOL = 1e-10    # well inside the 1e-8 validity bar, so a recomputed gradient stays under it
OBJ_TOL = 1e-9
JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)
_GH_X, _GH_W = np.polynomial.hermite.hermgauss(64)


def _log_lik(f, ys):
    return -float(np.sum(np.logaddexp(0.0, -ys * f)))


def _factor(K, W):
    """Cholesky of B = I + sW K sW, escalating diagonal jitter on K if needed."""
    sW = np.sqrt(W)
    n = K.shape[0]
    for jitter in JITTERS:
        B = np.eye(n) + sW[:, None] * (K + jitter * np.eye(n)) * sW[None, :]
        try:
            return cholesky(B, lower=True, check_finite=False), sW, jitter
        except LinAlgError:
            continue
    raise CholeskyFailure(f"B = I + W^1/2 K W^1/2 not positive definite with jitter up to {JITTERS[-1]}")


def laplace_mode(K, t, max_iter=100):
    """Newton iterations for the posterior mode.

    Returns ``(f, a, info)``. Convergence: gradient norm below 1e-10, or an
    objective change below 1e-9 on a step that no longer reduces the
    gradient (the round-off floor). More than ``max_iter`` steps raises
    NonConvergence.
    """
    n = K.shape[0]
    ys = 2.0 * t - 1.0
    a = np.zeros(n)
    f = np.zeros(n)
    psi = _log_lik(f, ys)
    grad = (t - sigmoid(f)) - a
    gnorm = float(np.linalg.norm(grad))
    for it in range(1, max_iter + 1):
        if gnorm < GRAD_TOL:
            return f, a, {"iterations": it - 1, "grad_norm": gnorm, "objective": psi}
        pi = sigmoid(f)
        W = pi * (1.0 - pi)
        L, sW, _ = _factor(K, W)
        b = W * f + (t - pi)
        c = solve_triangular(L, sW * (K @ b), lower=True, check_finite=False)
        a_new = b - sW * solve_triangular(L.T, c, lower=False, check_finite=False)
        step = a_new - a
        lam = 1.0
        while True:
            a_try = a + lam * step
            f_try = K @ a_try
            psi_try = -0.5 * float(a_try @ f_try) + _log_lik(f_try, ys)
            if psi_try >= psi - 1e-12 * abs(psi) or lam < 1e-6:
                break
            lam *= 0.5
        grad_try = (t - sigmoid(f_try)) - a_try
        gnorm_try = float(np.linalg.norm(grad_try))
        stalled = abs(psi_try - psi) < OBJ_TOL and gnorm_try >= gnorm
        if stalled:
            return f, a, {"iterations": it, "grad_norm": gnorm, "objective": psi}
        a, f, psi, gnorm = a_try, f_try, psi_try, gnorm_try
    if gnorm < GRAD_TOL:
        return f, a, {"iterations": max_iter, "grad_norm": gnorm, "objective": psi}
    raise NonConvergence("gaussian_process", f"gradient norm {gnorm:.3g} after {max_iter} Newton steps")


class GaussianProcessClassifier(Model):
    kind = Kind.GAUSSIAN_PROCESS

    def __init__(self, X, t, f, a, gamma, signal_variance, proba_method, info=None):
        self.X = np.ascontiguousarray(X, dtype=np.float64).reshape(-1, 2)
        self.t = np.asarray(t, dtype=np.float64)
        self.f = np.asarray(f, dtype=np.float64)
        self.a = np.asarray(a, dtype=np.float64)
        self.gamma = float(gamma)
        self.signal_variance = float(signal_variance)
        self.proba_method = proba_method
        self.info = info or {}
        self.resid = self.t - sigmoid(self.f)   # predictive mean weights: d log p / d f at the mode
        self._L = None

    def kernel(self, A, B):
        return self.signal_variance * rbf_kernel(A, B, self.gamma)

    def _chol(self):
        if self._L is None:
            pi = sigmoid(self.f)
            K = self.kernel(self.X, self.X)
            self._L, self._sW, _ = _factor(K, pi * (1.0 - pi))
        return self._L, self._sW

    def mode_gradient(self) -> np.ndarray:
        """Gradient of the log posterior at the stored mode, ``(t - pi) - a``."""
        f = self.kernel(self.X, self.X) @ self.a
        return (self.t - sigmoid(f)) - self.a

    def latent_mean(self, X):
        return self.kernel(X, self.X) @ self.resid

    def latent_predictive(self, X):
        Ks = self.kernel(self.X, X)
        mu = Ks.T @ self.resid
        L, sW = self._chol()
        v = solve_triangular(L, sW[:, None] * Ks, lower=True, check_finite=False)
        var = self.signal_variance - np.einsum("ij,ij->j", v, v)
        return mu, np.maximum(var, 0.0)

    def decision_function(self, X):
        """Latent predictive mean; its sign is the sign of ``proba - 1/2``."""
        return self.latent_mean(X)

    def predict_proba(self, X):
        mu, var = self.latent_predictive(X)
        if self.proba_method == "probit":
            return sigmoid(mu / np.sqrt(1.0 + np.pi * var / 8.0))
        s = np.sqrt(2.0 * var)
        vals = sigmoid(mu[:, None] + s[:, None] * _GH_X[None, :])
        return vals @ _GH_W / np.sqrt(np.pi)

    def log_marginal_likelihood(self) -> float:
        L, _ = self._chol()
        ys = 2.0 * self.t - 1.0
        return -0.5 * float(self.a @ self.f) + _log_lik(self.f, ys) - float(np.sum(np.log(np.diag(L))))

    def metadata(self):
        return {"proba_method": self.proba_method, "gamma": self.gamma,
                "signal_variance": self.signal_variance, **self.info}

    def to_payload(self):
        return {"X": self.X.tolist(), "t": self.t.tolist(), "f": self.f.tolist(),
                "a": self.a.tolist(), "gamma": self.gamma,
                "signal_variance": self.signal_variance, "proba_method": self.proba_method,
                "info": self.info}

    @classmethod
    def from_payload(cls, p):
        return cls(p["X"], p["t"], p["f"], p["a"], p["gamma"], p["signal_variance"],
                   p["proba_method"], p.get("info"))


def fit_gp(X, y, gamma="scale", signal_variance=1.0, proba_method="probit", max_iter=100,
           seed=0) -> GaussianProcessClassifier:
    g = resolve_gamma(gamma, X)
    K = signal_variance * rbf_kernel(X, X, g)
    t = (y == 1).astype(np.float64)
    f, a, info = laplace_mode(K, t, max_iter=max_iter)
    model = GaussianProcessClassifier(X, t, f, a, g, signal_variance, proba_method, info)
    model.info["log_marginal_likelihood"] = model.log_marginal_likelihood()
    return model


register(Kind.GAUSSIAN_PROCESS, {
    "gamma": P("scale", real(0, None, lo_open=True, allow=("scale",))),
    "signal_variance": P(1.0, real(0, None, lo_open=True), float),
    "proba_method": P("probit", choice("probit", "quadrature")),
    "max_iter": P(100, integer(1, 10_000)),
}, fit_gp, GaussianProcessClassifier)
