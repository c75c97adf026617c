import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iqbench.errors import InvalidParams, ZeroDetuning
from iqbench.iqcore import StateLabel
from iqbench.synthgen import (DEFAULT_DECAY, CloudParams, DispersiveParams, bayes_optimal_accuracy,
                              bayes_rule, dispersive_shift, generate, separation_for_accuracy)

from oracles import monte_carlo_bayes_accuracy, normal_cdf, quadrature_bayes_accuracy


def test_dispersive_shift_examples():
    p = DispersiveParams(7.0, 8.0, 0.1)
    assert dispersive_shift(p, StateLabel.GROUND) == pytest.approx(7.01, abs=1e-12)
    assert dispersive_shift(p, StateLabel.EXCITED) == pytest.approx(6.99, abs=1e-12)
    flat = DispersiveParams(7.0, 8.0, 0.0)
    assert dispersive_shift(flat, 0) == dispersive_shift(flat, 1) == 7.0


def test_zero_detuning():
    with pytest.raises(ZeroDetuning):
        dispersive_shift(DispersiveParams(5.0, 5.0, 0.1), StateLabel.GROUND)


def test_dispersive_ratio():
    assert DispersiveParams(7.0, 8.0, 0.1).dispersive_ratio() == pytest.approx(10.0)


@settings(max_examples=200, deadline=None)
@given(wr=st.floats(1, 10), delta=st.floats(0.05, 3), sign=st.sampled_from([-1, 1]),
       g=st.floats(0, 0.5))
def test_shift_identities(wr, delta, sign, g):
    p = DispersiveParams(wr, wr + sign * delta, g)
    sg, se = dispersive_shift(p, 0), dispersive_shift(p, 1)
    assert sg - se == pytest.approx(2 * g * g / p.delta(), rel=1e-9, abs=1e-12)
    assert sg + se == pytest.approx(2 * wr, rel=1e-12)


@pytest.mark.parametrize("kwargs,field", [
    ({"sigma": 0.0}, "sigma"), ({"decay_prob": 1.0}, "decay_prob"), ({"decay_prob": -0.1}, "decay_prob"),
    ({"mean1": (0.2, -0.4)}, "mean1"), ({"shots_per_class": 0}, "shots_per_class"),
])
def test_cloud_params_validation(kwargs, field):
    with pytest.raises(InvalidParams) as exc:
        CloudParams(**kwargs)
    assert exc.value.field == field


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(InvalidParams) as exc:
        CloudParams.from_dict({"sigma": 0.3, "colour": "red"})
    assert exc.value.field == "colour"
    assert CloudParams.from_dict(CloudParams().to_dict()) == CloudParams()


def test_generate_counts_order_and_determinism():
    p = CloudParams(shots_per_class=500, seed=3)
    a, b = generate(p), generate(p)
    assert a == b
    assert a.class_counts() == {StateLabel.GROUND: 500, StateLabel.EXCITED: 500}
    assert np.all(a.labels[:500] == 0) and np.all(a.labels[500:] == 1)
    assert generate(CloudParams(shots_per_class=500, seed=4)) != a


def test_degenerate_limit_without_decay():
    p = CloudParams(mean0=(0, 0), mean1=(1, 1), sigma=1e-9, decay_prob=0.0, shots_per_class=200)
    d = generate(p)
    assert np.allclose(d.points[d.labels == 0], [0, 0], atol=1e-7)
    assert np.allclose(d.points[d.labels == 1], [1, 1], atol=1e-7)


def test_decayed_fraction_law_of_large_numbers():
    n = 100_000
    p = CloudParams(mean0=(0, 0), mean1=(1, 0), sigma=1e-6, decay_prob=0.1, shots_per_class=n, seed=5)
    d = generate(p)
    exc = d.points[d.labels == 1]
    frac = np.mean(np.sum(exc ** 2, axis=1) < np.sum((exc - [1, 0]) ** 2, axis=1))
    assert abs(frac - 0.1) <= 3 * math.sqrt(0.1 * 0.9 / n)


def test_ground_centroid_converges():
    n = 200_000
    p = CloudParams(shots_per_class=n, seed=8)
    c = generate(p).centroid(0)
    assert np.all(np.abs(c - np.asarray(p.mean0)) <= 4 * p.sigma / math.sqrt(n))


def test_bayes_accuracy_closed_forms():
    p = CloudParams(mean0=(0, 0), mean1=(1.3, 0), sigma=0.7, decay_prob=0.0)
    assert bayes_optimal_accuracy(p) == pytest.approx(normal_cdf(1.3 / 1.4), abs=1e-15)
    far = CloudParams(mean0=(0, 0), mean1=(100, 0), sigma=0.1, decay_prob=0.0)
    assert bayes_optimal_accuracy(far) == 1.0
    far_decay = CloudParams(mean0=(0, 0), mean1=(100, 0), sigma=0.1, decay_prob=0.3)
    assert bayes_optimal_accuracy(far_decay) == pytest.approx(1 - 0.3 / 2, abs=1e-15)


@pytest.mark.parametrize("params", [
    CloudParams(),
    CloudParams(mean0=(0, 0), mean1=(1, 0.5), sigma=0.6, decay_prob=0.0),
    CloudParams(mean0=(-1, 2), mean1=(1, 2), sigma=0.4, decay_prob=0.25),
])
def test_bayes_accuracy_against_monte_carlo(params):
    n = 10_000_000
    mc = monte_carlo_bayes_accuracy(params.mean0, params.mean1, params.sigma, params.decay_prob, n, 17)
    exact = bayes_optimal_accuracy(params)
    # the sampling error alone is ~9e-5 here, so the 1e-4 error bound is
    # checked against quadrature and the simulation against its own spread
    assert abs(mc - exact) <= 3 * math.sqrt(exact * (1 - exact) / n)
    quad = quadrature_bayes_accuracy(params.mean0, params.mean1, params.sigma, params.decay_prob)
    assert abs(quad - exact) <= 1e-4
    assert abs(quad - exact) <= 1e-9


def test_far_field_decay_monte_carlo():
    p = CloudParams(mean0=(0, 0), mean1=(50, 0), sigma=0.5, decay_prob=0.2)
    mc = monte_carlo_bayes_accuracy(p.mean0, p.mean1, p.sigma, p.decay_prob, 1_000_000, 2)
    assert abs(mc - 0.9) <= 3 * math.sqrt(0.9 * 0.1 / 1_000_000)


def test_default_calibration():
    p = CloudParams()
    assert p.decay_prob == DEFAULT_DECAY
    assert bayes_optimal_accuracy(p) == pytest.approx(0.91, abs=1e-12)
    assert p.separation / p.sigma == pytest.approx(separation_for_accuracy(0.91, 0.08), rel=1e-12)


def test_bayes_rule_is_nearest_mean():
    p = CloudParams(mean0=(0, 0), mean1=(2, 0))
    assert bayes_rule(p, [[0.9, 5], [1.1, -5]]).tolist() == [0, 1]


def test_separation_unreachable():
    with pytest.raises(InvalidParams):
        separation_for_accuracy(0.97, 0.08)    # above 1 - p/2
