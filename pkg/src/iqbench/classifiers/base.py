"""Uniform fit / predict contract shared by the eight discriminators."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Callable, Mapping

import numpy as np

from ..errors import InvalidHyperparam, NonFiniteInput, ProbaUnsupported
from ..iqcore import Dataset, StateLabel

MODEL_FORMAT = "iqbench-model"
MODEL_VERSION = 1


class Kind(str, enum.Enum):
    FIDELITY_FIT = "fidelity_fit"
    LINEAR_SVM = "linear_svm"
    RBF_SVM = "rbf_svm"
    NAIVE_BAYES = "naive_bayes"
    ADABOOST = "adaboost"
    RANDOM_FOREST = "random_forest"
    GAUSSIAN_PROCESS = "gaussian_process"
    NEURAL_NET = "neural_net"

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self]


DISPLAY_NAMES = {
    Kind.ADABOOST: "Ada Boost",
    Kind.LINEAR_SVM: "Linear SVM",
    Kind.GAUSSIAN_PROCESS: "Gaussian Process",
    Kind.NAIVE_BAYES: "Naive Bayes",
    Kind.FIDELITY_FIT: "Fidelity Fit",
    Kind.RANDOM_FOREST: "Random Forest",
    Kind.RBF_SVM: "RBF SVM",
    Kind.NEURAL_NET: "Neural Network",
}


@dataclass(frozen=True)
class Param:
    """One hyperparameter: its default and a predicate with a failure message."""

    default: Any
    check: Callable[[Any], bool]
    expect: str
    coerce: Callable[[Any], Any] = lambda v: v


def real(lo=None, hi=None, lo_open=False, hi_open=False, allow=()):
    def check(v):
        if v in allow:
            return True
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
            return False
        if lo is not None and (v < lo or (lo_open and v == lo)):
            return False
        if hi is not None and (v > hi or (hi_open and v == hi)):
            return False
        return True

    lb = "(" if lo_open else "["
    rb = ")" if hi_open else "]"
    expect = f"real in {lb}{lo if lo is not None else '-inf'}, {hi if hi is not None else 'inf'}{rb}"
    if allow:
        expect += f" or one of {list(allow)}"
    return check, expect


def integer(lo, hi):
    def check(v):
        return isinstance(v, (int, np.integer)) and not isinstance(v, bool) and lo <= v <= hi
    return check, f"integer in [{lo}, {hi}]"


def choice(*options):
    return (lambda v: v in options), f"one of {list(options)}"


def flag():
    return (lambda v: isinstance(v, bool)), "boolean"


def P(default, check_expect, coerce=None) -> Param:
    check, expect = check_expect
    return Param(default, check, expect, coerce or (lambda v: v))


# Filled by each model module at import time.
SCHEMAS: dict[Kind, dict[str, Param]] = {}
TRAINERS: dict[Kind, Callable] = {}
MODEL_TYPES: dict[Kind, type] = {}


def register(kind: Kind, schema: dict[str, Param], trainer: Callable, model_type: type):
    SCHEMAS[kind] = schema
    TRAINERS[kind] = trainer
    MODEL_TYPES[kind] = model_type


def validate_hyperparams(kind: Kind, hyperparams: Mapping[str, Any]) -> dict[str, Any]:
    schema = SCHEMAS[kind]
    for name in hyperparams:
        if name not in schema:
            raise InvalidHyperparam(name, f"not a hyperparameter of {kind.value}")
    out = {}
    for name, p in schema.items():
        value = hyperparams.get(name, p.default)
        if isinstance(value, np.generic):
            value = value.item()
        if not p.check(value):
            raise InvalidHyperparam(name, f"expected {p.expect}, got {value!r}")
        out[name] = p.coerce(value)
    return out


@dataclass(frozen=True)
class ClassifierSpec:
    kind: Kind
    hyperparams: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0
    standardize: bool = False

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        hp = validate_hyperparams(kind, dict(self.hyperparams))
        object.__setattr__(self, "hyperparams", MappingProxyType(hp))

    def with_params(self, **overrides) -> "ClassifierSpec":
        return ClassifierSpec(self.kind, {**self.hyperparams, **overrides}, self.seed, self.standardize)

    def with_seed(self, seed: int) -> "ClassifierSpec":
        return ClassifierSpec(self.kind, dict(self.hyperparams), seed, self.standardize)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "hyperparams": dict(self.hyperparams),
                "seed": int(self.seed), "standardize": bool(self.standardize)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ClassifierSpec":
        return cls(Kind(d["kind"]), dict(d.get("hyperparams", {})), int(d.get("seed", 0)),
                   bool(d.get("standardize", False)))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


class Model:
    """Fitted parameters of one discriminator.

    ``decision_function`` returns a score that grows towards the excited
    state; labels are ``score > 0`` (a zero score maps to ground).
    """

    kind: Kind
    supports_proba = True

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(np.int8)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        raise ProbaUnsupported(f"{self.kind.value} does not produce probabilities")

    def metadata(self) -> dict:
        return {}

    def to_payload(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_payload(cls, payload: dict) -> "Model":
        raise NotImplementedError


def as_points(points) -> np.ndarray:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 2)
    if X.ndim != 2 or X.shape[1] != 2:
        raise NonFiniteInput(f"expected (n, 2) IQ points, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("IQ points must be finite")
    return X


@dataclass(frozen=True)
class TrainedModel:
    spec: ClassifierSpec
    params: Model
    scaler: tuple | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @property
    def supports_proba(self) -> bool:
        return self.params.supports_proba

    @property
    def kind(self) -> Kind:
        return self.spec.kind

    def _prep(self, points):
        X = as_points(points)
        if self.scaler is not None:
            mean, scale = self.scaler
            X = (X - mean) / scale
        return X

    def predict(self, points) -> np.ndarray:
        return self.params.predict(self._prep(points))

    def predict_proba(self, points) -> np.ndarray:
        return self.params.predict_proba(self._prep(points))

    def decision_function(self, points) -> np.ndarray:
        return self.params.decision_function(self._prep(points))

    def roc_scores(self, points) -> np.ndarray:
        """Excited-class probability, or the signed margin where none exists."""
        if self.supports_proba:
            return self.predict_proba(points)
        return self.decision_function(points)

    def predict_labels(self, points) -> list[StateLabel]:
        return [StateLabel(int(v)) for v in self.predict(points)]

    def to_json(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "spec": self.spec.to_dict(),
            "scaler": None if self.scaler is None else [list(map(float, a)) for a in self.scaler],
            "metadata": dict(self.metadata),
            "payload": self.params.to_payload(),
        }

    @classmethod
    def from_json(cls, blob: Mapping) -> "TrainedModel":
        if blob.get("format") != MODEL_FORMAT:
            raise ValueError(f"not an {MODEL_FORMAT} file")
        if blob.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {blob.get('version')}")
        spec = ClassifierSpec.from_dict(blob["spec"])
        scaler = blob.get("scaler")
        if scaler is not None:
            scaler = (np.array(scaler[0]), np.array(scaler[1]))
        params = MODEL_TYPES[spec.kind].from_payload(blob["payload"])
        return cls(spec, params, scaler, dict(blob.get("metadata", {})))


def fit(spec: ClassifierSpec, train: Dataset, **fit_options) -> TrainedModel:
    """Train the discriminator described by ``spec`` on ``train``."""
    train.require_both_classes("training set")
    X = np.asarray(train.points, dtype=np.float64)
    y = np.asarray(train.labels, dtype=np.int8)
    scaler = None
    if spec.standardize:
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        scaler = (mean, scale)
        X = (X - mean) / scale
    params = TRAINERS[spec.kind](X, y, seed=spec.seed, **dict(spec.hyperparams), **fit_options)
    meta = {"standardize": spec.standardize, **params.metadata()}
    return TrainedModel(spec, params, scaler, meta)


def predict(model: TrainedModel, points) -> list[StateLabel]:
    return model.predict_labels(points)


def predict_proba(model: TrainedModel, points) -> list[float]:
    return [float(p) for p in model.predict_proba(points)]


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_json(), indent=1) + "\n", encoding="utf-8")


def load_model(path) -> TrainedModel:
    return TrainedModel.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def to_signed(y) -> np.ndarray:
    return np.where(np.asarray(y) > 0, 1.0, -1.0)
