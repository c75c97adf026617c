import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iqbench.classifiers import ClassifierSpec, Kind, fit
from iqbench.errors import EmptyTestSet, FoldMissingClass, SingleClass
from iqbench.evalbench import (auc, confusion, evaluate, kfold_cv, kfold_indices,
                               mann_whitney_auc, roc)
from iqbench.iqcore import Dataset, split
from iqbench.synthgen import CloudParams, generate

from oracles import pairwise_auc


class Fixed:
    """Model stub returning preset labels."""

    def __init__(self, labels):
        self.labels = np.asarray(labels)

    def predict(self, X):
        return self.labels[: len(X)]


def test_planted_table_row_counts():
    # 94 of 100 excited shots right, 13 of 100 ground shots wrong
    y = np.r_[np.ones(100, int), np.zeros(100, int)]
    pred = np.r_[np.ones(94), np.zeros(6), np.ones(13), np.zeros(87)].astype(int)
    c = confusion(y, pred)
    assert (c.tp, c.fn, c.fp, c.tn) == (94, 6, 13, 87)
    assert c.tpr == 0.94 and c.fpr == 0.13
    assert c.accuracy == pytest.approx(0.905, abs=1e-15)


def test_perfect_and_inverted_models():
    data = Dataset(np.zeros((6, 2)), [0, 1, 1, 0, 1, 0])
    c, acc = evaluate(Fixed(data.labels), data)
    assert acc == 1.0 and c.fp == c.fn == 0
    partial = np.array([0, 1, 0, 0, 1, 1])
    _, a = evaluate(Fixed(partial), data)
    _, b = evaluate(Fixed(1 - partial), data)
    assert a + b == pytest.approx(1.0, abs=1e-15)


def test_empty_test_set():
    with pytest.raises(EmptyTestSet):
        evaluate(Fixed([]), Dataset(np.zeros((0, 2)), []))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=200))
def test_counts_partition(pairs):
    y, p = np.array(pairs).T
    c = confusion(y, p)
    assert c.n == len(pairs)
    assert c.accuracy == pytest.approx(1 - (c.fp + c.fn) / c.n, abs=1e-15)


def test_roc_examples():
    curve = roc([0.1, 0.4, 0.3, 0.8], [0, 0, 1, 1])
    assert auc(curve) == 0.75
    assert curve.thresholds[0] == np.inf
    perfect = roc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
    assert (0.0, 1.0) in [(f, t) for f, t, _ in perfect.points]
    assert auc(perfect) == 1.0
    flat = roc([0.3] * 6, [0, 1, 0, 1, 1, 0])
    assert flat.fpr.tolist() == [0.0, 1.0] and flat.tpr.tolist() == [0.0, 1.0]
    assert auc(flat) == 0.5


def test_roc_single_class():
    with pytest.raises(SingleClass):
        roc([0.1, 0.2], [1, 1])


scores_and_labels = st.integers(2, 100).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 12).map(lambda v: v / 4), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n)))


@settings(max_examples=300, deadline=None)
@given(scores_and_labels)
def test_auc_equals_pairwise_statistic(sl):
    s, lab = sl
    lab = np.array(lab)
    lab[0], lab[1] = 0, 1
    curve = roc(s, lab)
    assert abs(auc(curve) - pairwise_auc(s, lab)) <= 1e-12
    assert abs(mann_whitney_auc(s, lab) - pairwise_auc(s, lab)) <= 1e-12
    assert curve.fpr[0] == curve.tpr[0] == 0 and curve.fpr[-1] == curve.tpr[-1] == 1
    assert np.all(np.diff(curve.fpr) >= 0) and np.all(np.diff(curve.tpr) >= 0)


def test_kfold_sizes():
    folds = kfold_indices(100, 5, 0)
    assert [len(f) for f in folds] == [20] * 5
    assert sorted(np.concatenate(folds).tolist()) == list(range(100))
    loo = kfold_indices(10, 10, 3)
    assert [len(f) for f in loo] == [1] * 10
    assert kfold_indices(100, 5, 0)[2].tolist() == folds[2].tolist()


def test_loo_cross_validation_runs():
    rng = np.random.default_rng(0)
    data = Dataset(np.r_[rng.normal(0, 0.3, (5, 2)), rng.normal(3, 0.3, (5, 2))], [0] * 5 + [1] * 5)
    cv = kfold_cv(ClassifierSpec(Kind.NAIVE_BAYES), data, k=10, seed=0)
    assert len(cv.fold_accuracies) == 10 and cv.mean == 1.0


def test_fold_missing_class():
    data = Dataset(np.arange(12, dtype=float).reshape(6, 2), [0, 0, 0, 0, 0, 1])
    with pytest.raises(FoldMissingClass):
        kfold_cv(ClassifierSpec(Kind.NAIVE_BAYES), data, k=6, seed=0)


@pytest.mark.parametrize("kind", [Kind.NAIVE_BAYES, Kind.FIDELITY_FIT, Kind.LINEAR_SVM])
def test_cv_tracks_holdout_on_calibrated_benchmark(kind):
    data = generate(CloudParams())
    s = split(data, 0.25, 605787361)
    spec = ClassifierSpec(kind)
    cv = kfold_cv(spec, s.train, k=5, seed=1)
    _, holdout = evaluate(fit(spec, s.train), s.test)
    assert abs(cv.mean - holdout) <= 0.03
