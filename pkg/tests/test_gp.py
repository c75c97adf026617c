import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iqbench.classifiers.gp import fit_gp, laplace_mode

from oracles import gp_single_point_mode


@pytest.mark.parametrize("k", [1.0, 0.3, 2.5, 10.0])
@pytest.mark.parametrize("label", [0, 1])
def test_single_point_mode(k, label):
    f, a, info = laplace_mode(np.array([[k]]), np.array([float(label)]))
    assert f[0] == pytest.approx(gp_single_point_mode(k, label), abs=1e-10)
    assert info["grad_norm"] < 1e-8


def test_single_point_mode_against_grid_maximisation():
    # brute force over a fine grid of log sigmoid(f) - f^2 / 2
    grid = np.linspace(-3, 3, 600_001)
    obj = -np.logaddexp(0.0, -grid) - grid ** 2 / 2
    f, _, _ = laplace_mode(np.array([[1.0]]), np.array([1.0]))
    assert f[0] == pytest.approx(grid[np.argmax(obj)], abs=2e-5)


def test_far_apart_points_decouple():
    X = np.array([[0.0, 0.0], [100.0, 0.0]])
    m = fit_gp(X, np.array([0, 1]), gamma=1.0)
    assert m.f[0] == pytest.approx(gp_single_point_mode(1.0, 0), abs=1e-10)
    assert m.f[1] == pytest.approx(gp_single_point_mode(1.0, 1), abs=1e-10)


@pytest.mark.parametrize("method", ["probit", "quadrature"])
def test_far_field_is_even(method, separable):
    m = fit_gp(separable.points, separable.labels, proba_method=method)
    p = m.predict_proba(np.array([[1e3, -1e3], [-50.0, 80.0]]))
    assert np.all(np.abs(p - 0.5) <= 1e-6)


def test_probit_and_quadrature_agree(calibrated_small):
    X, y = calibrated_small.points[::3], calibrated_small.labels[::3]
    a = fit_gp(X, y, proba_method="probit")
    b = fit_gp(X, y, proba_method="quadrature")
    q = np.random.default_rng(0).uniform(-1, 2.5, (200, 2))
    assert np.max(np.abs(a.predict_proba(q) - b.predict_proba(q))) < 0.02
    assert b.metadata()["proba_method"] == "quadrature"


def test_predictive_variance_shrinks_near_data(separable):
    m = fit_gp(separable.points, separable.labels)
    _, var_near = m.latent_predictive(separable.points[:5])
    _, var_far = m.latent_predictive(np.array([[40.0, 40.0]]))
    assert np.all(var_near < var_far[0])
    assert var_far[0] == pytest.approx(1.0)


@st.composite
def gp_case(draw):
    n = draw(st.integers(2, 50))
    rng = np.random.default_rng(draw(st.integers(0, 2**31)))
    y = rng.integers(0, 2, n)
    y[:2] = [0, 1]
    X = rng.normal(size=(n, 2)) * draw(st.floats(0.1, 3)) + draw(st.floats(0, 2)) * y[:, None]
    return X, y


@settings(max_examples=60, deadline=None)
@given(gp_case(), st.sampled_from(["scale", 0.5, 5.0]), st.sampled_from([0.5, 1.0, 4.0]))
def test_mode_gradient_vanishes(case, gamma, sv):
    X, y = case
    m = fit_gp(X, y, gamma=gamma, signal_variance=sv)
    assert np.linalg.norm(m.mode_gradient()) < 1e-8
    p = m.predict_proba(X)
    assert np.all((p > 0) & (p < 1))
