"""Interface contracts shared by all eight discriminators."""

import numpy as np
import pytest

from iqbench.classifiers import (ALL_KINDS, ClassifierSpec, Kind, fit, load_model, predict,
                                 predict_proba, save_model)
from iqbench.errors import EmptyClass, InvalidHyperparam, NonFiniteInput, ProbaUnsupported
from iqbench.iqcore import Dataset, IQPoint, StateLabel

# small, fast settings; defaults are exercised by the end-to-end runs
FAST = {
    Kind.ADABOOST: {"n_estimators": 20},
    Kind.RANDOM_FOREST: {"n_estimators": 15},
    Kind.NEURAL_NET: {"layer1": 16, "layer2": 16, "epochs": 20},
}


def spec(kind, seed=0, **extra):
    return ClassifierSpec(kind, {**FAST.get(kind, {}), **extra}, seed)


@pytest.fixture(scope="module")
def fitted(separable):
    return {k: fit(spec(k), separable) for k in ALL_KINDS}


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_training_accuracy_on_separable_clouds(kind, fitted, separable):
    acc = np.mean(fitted[kind].predict(separable.points) == separable.labels)
    assert acc >= 0.95


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_centroids_are_classified(kind, fitted):
    labels = predict(fitted[kind], [IQPoint(0.0, 0.0), IQPoint(3.0, 3.0)])
    assert labels == [StateLabel.GROUND, StateLabel.EXCITED]


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_batch_equals_single_points(kind, fitted, probe_grid):
    m = fitted[kind]
    batch = m.predict(probe_grid)
    singles = np.array([m.predict(p[None, :])[0] for p in probe_grid])
    assert np.array_equal(batch, singles)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_proba_consistent_with_labels(kind, fitted, probe_grid):
    m = fitted[kind]
    if not m.supports_proba:
        with pytest.raises(ProbaUnsupported):
            m.predict_proba(probe_grid)
        return
    p = m.predict_proba(probe_grid)
    assert np.all((p >= 0) & (p <= 1))
    labels = m.predict(probe_grid)
    decided = p != 0.5
    assert np.array_equal(labels[decided], (p[decided] > 0.5).astype(labels.dtype))
    assert np.all(labels[~decided] == 0)      # ties go to ground


def test_only_fidelity_fit_lacks_proba(fitted):
    assert [k for k in ALL_KINDS if not fitted[k].supports_proba] == [Kind.FIDELITY_FIT]
    with pytest.raises(ProbaUnsupported):
        predict_proba(fitted[Kind.FIDELITY_FIT], [IQPoint(0, 0)])


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_fit_is_deterministic(kind, separable, probe_grid, fitted):
    again = fit(spec(kind), separable)
    assert np.array_equal(again.decision_function(probe_grid),
                          fitted[kind].decision_function(probe_grid))


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_save_load_round_trip(kind, fitted, tmp_path, probe_grid):
    m = fitted[kind]
    save_model(m, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert back.spec == m.spec
    assert np.array_equal(back.decision_function(probe_grid), m.decision_function(probe_grid))
    if m.supports_proba:
        assert np.array_equal(back.predict_proba(probe_grid), m.predict_proba(probe_grid))


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_single_class_training_set(kind):
    data = Dataset(np.random.default_rng(0).normal(size=(10, 2)), np.ones(10, dtype=int))
    with pytest.raises(EmptyClass):
        fit(spec(kind), data)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_non_finite_query(kind, fitted):
    with pytest.raises(NonFiniteInput):
        fitted[kind].predict([[0.0, np.inf]])


@pytest.mark.parametrize("kind,params", [
    (Kind.LINEAR_SVM, {"C": 0.0}),
    (Kind.RBF_SVM, {"degree": 5}),
    (Kind.RBF_SVM, {"gamma": -1.0}),
    (Kind.ADABOOST, {"n_estimators": 5}),
    (Kind.ADABOOST, {"learning_rate": 1.5}),
    (Kind.ADABOOST, {"algorithm": "SAMME.X"}),
    (Kind.RANDOM_FOREST, {"criterion": "mse"}),
    (Kind.NEURAL_NET, {"layer1": 8}),
    (Kind.NEURAL_NET, {"learning_rate": 0.1}),
    (Kind.NEURAL_NET, {"activation": "elu"}),
    (Kind.FIDELITY_FIT, {"C": 1.0}),
])
def test_invalid_hyperparams(kind, params):
    with pytest.raises(InvalidHyperparam) as exc:
        ClassifierSpec(kind, params)
    assert exc.value.field == next(iter(params))


def test_spec_digest_tracks_content():
    a = ClassifierSpec(Kind.LINEAR_SVM, {"C": 1.0})
    assert a.digest() == ClassifierSpec("linear_svm", {"C": 1}).digest()
    assert a.digest() != a.with_params(C=2.0).digest()
    assert a.digest() != a.with_seed(1).digest()


@pytest.mark.parametrize("kind", [Kind.LINEAR_SVM, Kind.NAIVE_BAYES, Kind.GAUSSIAN_PROCESS])
def test_standardize_flag_is_recorded_and_applied(kind, separable, probe_grid):
    m = fit(ClassifierSpec(kind, standardize=True), separable)
    assert m.metadata["standardize"] is True and m.scaler is not None
    assert np.mean(m.predict(separable.points) == separable.labels) >= 0.95


def test_trained_model_is_frozen(fitted):
    with pytest.raises(AttributeError):
        fitted[Kind.NAIVE_BAYES].spec = None
