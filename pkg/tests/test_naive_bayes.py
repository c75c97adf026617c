import numpy as np
import pytest
from scipy.stats import norm

from iqbench.classifiers.naive_bayes import fit_naive_bayes

X4 = np.array([[0.0, 0.0], [1.0, 1.0], [4.0, 4.0], [5.0, 5.0]])
Y4 = np.array([0, 0, 1, 1])


def test_four_point_parameters():
    m = fit_naive_bayes(X4, Y4)
    assert m.means.tolist() == [[0.5, 0.5], [4.5, 4.5]]
    assert m.variances == pytest.approx(np.full((2, 2), 0.25), rel=1e-7)
    assert m.priors.tolist() == [0.5, 0.5]


def test_four_point_posterior_against_density_evaluation():
    m = fit_naive_bayes(X4, Y4, var_smoothing=0.0)
    q = np.array([1.0, 1.0])
    sd = 0.5
    l0 = norm.pdf(q[0], 0.5, sd) * norm.pdf(q[1], 0.5, sd)
    l1 = norm.pdf(q[0], 4.5, sd) * norm.pdf(q[1], 4.5, sd)
    expected = l1 / (l0 + l1)
    p = m.predict_proba(q[None, :])[0]
    assert p < 0.5
    assert p == pytest.approx(expected, rel=1e-9, abs=1e-300)
    z = np.array([[2.0, 2.4]])
    l0 = norm.pdf(2.0, 0.5, sd) * norm.pdf(2.4, 0.5, sd)
    l1 = norm.pdf(2.0, 4.5, sd) * norm.pdf(2.4, 4.5, sd)
    assert m.predict_proba(z)[0] == pytest.approx(l1 / (l0 + l1), rel=1e-9)


def test_equidistant_query_is_even():
    m = fit_naive_bayes(X4, Y4)
    assert m.predict_proba(np.array([[2.5, 2.5]]))[0] == 0.5
    assert m.predict(np.array([[2.5, 2.5]]))[0] == 0


def test_duplicating_points_changes_nothing():
    a = fit_naive_bayes(X4, Y4)
    b = fit_naive_bayes(np.vstack([X4, X4]), np.r_[Y4, Y4])
    assert np.array_equal(a.means, b.means)
    assert np.allclose(a.variances, b.variances, rtol=1e-15, atol=0)
    assert np.array_equal(a.priors, b.priors)


def test_variance_floor_keeps_duplicate_class_usable():
    X = np.array([[1.0, 1.0], [1.0, 1.0], [3.0, 2.0], [4.0, 5.0]])
    m = fit_naive_bayes(X, np.array([0, 0, 1, 1]))
    assert np.all(m.variances[0] > 0)
    assert np.all(np.isfinite(m.predict_proba(np.array([[1.0, 1.0], [10.0, 10.0]]))))


def test_empirical_priors():
    X = np.array([[0.0, 0], [0.1, 0], [0.2, 0], [5.0, 5]])
    m = fit_naive_bayes(X, np.array([0, 0, 0, 1]))
    assert m.priors.tolist() == [0.75, 0.25]
