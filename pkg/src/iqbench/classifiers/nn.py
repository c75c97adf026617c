"""Two-hidden-layer feed-forward network trained on binary cross-entropy.

Architecture: 2 inputs -> layer1 -> layer2 -> 1 logit -> sigmoid. The "rbf"
activation is the Gaussian bump ``exp(-z^2)``. Weights use Glorot-uniform
initialisation with zero biases; optimiser constants follow the Keras
defaults (Adam betas 0.9/0.999, RMSprop rho 0.9, Adagrad initial
accumulator 0.1, epsilon 1e-7 throughout).
"""

from __future__ import annotations

import numpy as np

from ..errors import DivergenceDetected
from .base import Kind, Model, P, choice, flag, integer, real, register, sigmoid

LAYER_BOUNDS = (16, 1056)
LR_BOUNDS = (1e-4, 1e-2)
EPS = 1e-7


def _act(name, z):
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "sigmoid":
        return sigmoid(z)
    if name == "tanh":
        return np.tanh(z)
    return np.exp(-z * z)


def _act_grad(name, z, a):
    """Derivative of the activation given pre-activation z and output a."""
    if name == "relu":
        return (z > 0).astype(z.dtype)
    if name == "sigmoid":
        return a * (1.0 - a)
    if name == "tanh":
        return 1.0 - a * a
    return -2.0 * z * a


class MLP:
    def __init__(self, weights, activation):
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]   # W1 b1 W2 b2 W3 b3
        self.activation = activation

    @classmethod
    def init(cls, layer1, layer2, activation, rng, zero_output=False):
        def glorot(fan_in, fan_out):
            lim = np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-lim, lim, size=(fan_in, fan_out))

        W3 = np.zeros((layer2, 1)) if zero_output else glorot(layer2, 1)
        return cls([glorot(2, layer1), np.zeros(layer1), glorot(layer1, layer2), np.zeros(layer2),
                    W3, np.zeros(1)], activation)

    def logits(self, X):
        W1, b1, W2, b2, W3, b3 = self.weights
        h1 = _act(self.activation, X @ W1 + b1)
        h2 = _act(self.activation, h1 @ W2 + b2)
        return (h2 @ W3 + b3)[:, 0]

    def loss_and_grad(self, X, y):
        """Mean binary cross-entropy and its gradient for every weight array."""
        W1, b1, W2, b2, W3, b3 = self.weights
        act = self.activation
        z1 = X @ W1 + b1
        h1 = _act(act, z1)
        z2 = h1 @ W2 + b2
        h2 = _act(act, z2)
        z3 = (h2 @ W3 + b3)[:, 0]
        n = X.shape[0]
        loss = float(np.mean(np.logaddexp(0.0, z3) - y * z3))
        d3 = ((sigmoid(z3) - y) / n)[:, None]
        gW3 = h2.T @ d3
        gb3 = d3.sum(axis=0)
        d2 = (d3 @ W3.T) * _act_grad(act, z2, h2)
        gW2 = h1.T @ d2
        gb2 = d2.sum(axis=0)
        d1 = (d2 @ W2.T) * _act_grad(act, z1, h1)
        gW1 = X.T @ d1
        gb1 = d1.sum(axis=0)
        return loss, [gW1, gb1, gW2, gb2, gW3, gb3]

    def loss(self, X, y) -> float:
        z = self.logits(X)
        return float(np.mean(np.logaddexp(0.0, z) - y * z))

    def flat(self) -> np.ndarray:
        return np.concatenate([w.ravel() for w in self.weights])

    def with_flat(self, theta) -> "MLP":
        out, k = [], 0
        for w in self.weights:
            out.append(np.asarray(theta[k:k + w.size]).reshape(w.shape))
            k += w.size
        return MLP(out, self.activation)


class Optimizer:
    def __init__(self, name, lr, shapes):
        self.name = name
        self.lr = lr
        self.t = 0
        init = 0.1 if name == "Adagrad" else 0.0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.full(s, init) for s in shapes]

    def step(self, weights, grads):
        self.t += 1
        lr = self.lr
        for k, (w, g) in enumerate(zip(weights, grads)):
            if self.name == "SGD":
                w -= lr * g
            elif self.name == "Adam":
                self.m[k] = 0.9 * self.m[k] + 0.1 * g
                self.v[k] = 0.999 * self.v[k] + 0.001 * g * g
                lr_t = lr * np.sqrt(1.0 - 0.999 ** self.t) / (1.0 - 0.9 ** self.t)
                w -= lr_t * self.m[k] / (np.sqrt(self.v[k]) + EPS)
            elif self.name == "RMSprop":
                self.v[k] = 0.9 * self.v[k] + 0.1 * g * g
                w -= lr * g / (np.sqrt(self.v[k]) + EPS)
            else:   # Adagrad
                self.v[k] += g * g
                w -= lr * g / (np.sqrt(self.v[k]) + EPS)


class NeuralNet(Model):
    kind = Kind.NEURAL_NET

    def __init__(self, net: MLP, history=None, info=None):
        self.net = net
        self.history = list(history or [])
        self.info = info or {}

    def decision_function(self, X):
        return self.net.logits(X)

    def predict_proba(self, X):
        return sigmoid(self.net.logits(X))

    def metadata(self):
        return {"activation": self.net.activation,
                "activation_definition": "exp(-z^2)" if self.net.activation == "rbf" else self.net.activation,
                "final_loss": self.history[-1] if self.history else None, **self.info}

    def to_payload(self):
        return {"activation": self.net.activation, "weights": [w.tolist() for w in self.net.weights],
                "history": self.history, "info": self.info}

    @classmethod
    def from_payload(cls, p):
        return cls(MLP([np.array(w) for w in p["weights"]], p["activation"]), p.get("history"),
                   p.get("info"))


def fit_nn(X, y, layer1=64, layer2=64, activation="relu", optimizer="Adam",
           learning_rate=1e-3, epochs=30, batch_size=32, zero_output_init=False,
           seed=0) -> NeuralNet:
    """Mini-batch training; the epoch loss recorded is the mean over batches."""
    rng = np.random.default_rng(seed)
    net = MLP.init(layer1, layer2, activation, rng, zero_output_init)
    opt = Optimizer(optimizer, learning_rate, [w.shape for w in net.weights])
    t = (y == 1).astype(np.float64)
    n = X.shape[0]
    history = []
    for epoch in range(epochs):
        perm = rng.permutation(n)
        total = 0.0
        for start in range(0, n, batch_size):
            idx = perm[start:start + batch_size]
            loss, grads = net.loss_and_grad(X[idx], t[idx])
            if not np.isfinite(loss):
                raise DivergenceDetected("neural_net", f"non-finite loss at epoch {epoch}")
            opt.step(net.weights, grads)
            total += loss * len(idx)
        history.append(total / n)
    return NeuralNet(net, history, {"epochs": epochs, "batch_size": batch_size,
                                    "optimizer": optimizer, "learning_rate": learning_rate,
                                    "layers": [layer1, layer2]})


register(Kind.NEURAL_NET, {
    "layer1": P(64, integer(*LAYER_BOUNDS)),
    "layer2": P(64, integer(*LAYER_BOUNDS)),
    "activation": P("relu", choice("relu", "sigmoid", "tanh", "rbf")),
    "optimizer": P("Adam", choice("Adam", "Adagrad", "SGD", "RMSprop")),
    "learning_rate": P(1e-3, real(*LR_BOUNDS), float),
    "epochs": P(30, integer(1, 100_000)),
    "batch_size": P(32, integer(1, 1_000_000)),
    "zero_output_init": P(False, flag()),
}, fit_nn, NeuralNet)
