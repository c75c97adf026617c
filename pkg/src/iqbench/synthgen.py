"""Synthetic single-shot readout data.

The generative model: ground shots are isotropic Gaussians around ``mean0``;
excited shots come from the same cloud around ``mean1``, except that with
probability ``decay_prob`` the qubit relaxed before readout and the shot is
drawn from the ground cloud while keeping its excited label.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .errors import InvalidParams, ZeroDetuning
from .iqcore import Dataset, IQPoint, StateLabel


@dataclass(frozen=True)
class DispersiveParams:
    omega_r: float
    omega_a: float
    g: float

    def delta(self) -> float:
        return self.omega_a - self.omega_r

    def dispersive_ratio(self) -> float:
        """|detuning| / g; large values mean the dispersive approximation holds."""
        return math.inf if self.g == 0 else abs(self.delta()) / abs(self.g)


def dispersive_shift(p: DispersiveParams, state) -> float:
    """Resonator frequency dressed by the qubit state: omega_r +/- g^2 / delta."""
    delta = p.delta()
    if delta == 0:
        raise ZeroDetuning()
    chi = p.g * p.g / delta
    return p.omega_r + chi if StateLabel(state) == StateLabel.GROUND else p.omega_r - chi


# Calibrated by scripts/calibrate_defaults.py: Bayes-optimal accuracy 0.91 at
# decay_prob 0.08 needs a centroid separation of 3.208166965535006 sigma.
DEFAULT_SIGMA = 0.5
DEFAULT_DECAY = 0.08
DEFAULT_MEAN0 = (0.2, -0.4)
DEFAULT_MEAN1 = (1.1624500896605017, 0.8832667862140026)


@dataclass(frozen=True)
class CloudParams:
    mean0: IQPoint = IQPoint(*DEFAULT_MEAN0)
    mean1: IQPoint = IQPoint(*DEFAULT_MEAN1)
    sigma: float = DEFAULT_SIGMA
    decay_prob: float = DEFAULT_DECAY
    shots_per_class: int = 1250
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mean0", IQPoint(*map(float, self.mean0)))
        object.__setattr__(self, "mean1", IQPoint(*map(float, self.mean1)))
        self.validate()

    def validate(self):
        if not all(map(math.isfinite, (*self.mean0, *self.mean1))):
            raise InvalidParams("mean0/mean1", "cloud means must be finite")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidParams("sigma", f"must be > 0, got {self.sigma}")
        if not (0.0 <= self.decay_prob < 1.0):
            raise InvalidParams("decay_prob", f"must lie in [0, 1), got {self.decay_prob}")
        if tuple(self.mean0) == tuple(self.mean1):
            raise InvalidParams("mean1", "must differ from mean0")
        if int(self.shots_per_class) != self.shots_per_class or self.shots_per_class < 1:
            raise InvalidParams("shots_per_class", f"must be a positive integer, got {self.shots_per_class}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidParams("seed", f"must be an unsigned integer, got {self.seed}")

    @property
    def separation(self) -> float:
        return math.dist(self.mean0, self.mean1)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean0"], d["mean1"] = list(self.mean0), list(self.mean1)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CloudParams":
        known = {"mean0", "mean1", "sigma", "decay_prob", "shots_per_class", "seed"}
        unknown = set(d) - known
        if unknown:
            raise InvalidParams(sorted(unknown)[0], "unknown generator key")
        return cls(**d)


def generate(params: CloudParams) -> Dataset:
    """Draw ``shots_per_class`` ground shots followed by as many excited shots."""
    params.validate()
    rng = np.random.default_rng(params.seed)
    n = int(params.shots_per_class)
    m0 = np.asarray(params.mean0)
    m1 = np.asarray(params.mean1)
    ground = m0 + params.sigma * rng.standard_normal((n, 2))
    decayed = rng.random(n) < params.decay_prob
    centres = np.where(decayed[:, None], m0, m1)
    excited = centres + params.sigma * rng.standard_normal((n, 2))
    points = np.vstack([ground, excited])
    labels = np.repeat(np.array([0, 1], dtype=np.int8), n)
    return Dataset(points, labels, params.seed)


def bayes_optimal_accuracy(params: CloudParams) -> float:
    """Accuracy of the Bayes rule under the generative model, balanced classes.

    The excited density is ``p N(mean0) + (1 - p) N(mean1)``, so the likelihood
    ratio against the ground density exceeds one exactly when
    ``N(mean1) > N(mean0)``: the optimal boundary is the perpendicular bisector
    of the two means whatever the decay probability. Projecting onto the
    mean axis reduces everything to one dimension with ``Phi = Phi(d / 2 sigma)``:

        P(correct | ground)  = Phi
        P(correct | excited) = (1 - p) Phi + p (1 - Phi)

    and the average is ``(1 - p) Phi + p / 2``. The expression is exact; no
    numerical integration is involved.
    """
    params.validate()
    phi = float(ndtr(params.separation / (2.0 * params.sigma)))
    p = params.decay_prob
    return (1.0 - p) * phi + 0.5 * p


def bayes_rule(params: CloudParams, points) -> np.ndarray:
    """Label points with the Bayes-optimal rule (1 where nearer to mean1)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    d0 = np.sum((pts - np.asarray(params.mean0)) ** 2, axis=1)
    d1 = np.sum((pts - np.asarray(params.mean1)) ** 2, axis=1)
    return (d1 < d0).astype(np.int8)


def separation_for_accuracy(target: float, decay_prob: float) -> float:
    """Centroid distance in units of sigma giving ``target`` Bayes accuracy."""
    phi = (target - 0.5 * decay_prob) / (1.0 - decay_prob)
    if not (0.5 < phi < 1.0):
        raise InvalidParams("target", f"accuracy {target} unreachable with decay_prob {decay_prob}")
    return brentq(lambda r: float(ndtr(r / 2.0)) - phi, 1e-9, 80.0, xtol=1e-15, rtol=1e-15)
