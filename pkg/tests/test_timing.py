import time

import numpy as np
import pytest

from iqbench.evalbench import time_fit, time_predict, time_predict_interleaved, timing


class BusyWait:
    """Predict spins for ``per_shot`` seconds per input row."""

    def __init__(self, per_shot=1e-6):
        self.per_shot = per_shot

    def predict(self, X):
        end = time.perf_counter() + self.per_shot * len(X)
        while time.perf_counter() < end:
            pass
        return np.zeros(len(X), dtype=np.int8)


def test_busy_wait_stub_reads_one_microsecond_per_shot():
    stats = time_predict(BusyWait(), np.zeros((1000, 2)), repetitions=11)
    assert stats.unit == "us/shot"
    assert stats.median == pytest.approx(1.0, rel=0.2)
    assert len(stats.samples) == 11


def test_per_shot_time_survives_doubling_the_batch():
    a = time_predict(BusyWait(), np.zeros((1000, 2)), repetitions=5)
    b = time_predict(BusyWait(), np.zeros((2000, 2)), repetitions=5)
    assert b.median == pytest.approx(a.median, rel=0.2)


def test_constant_workload_has_small_spread():
    stats = time_predict(BusyWait(), np.zeros((2000, 2)), repetitions=7)
    assert all(s == pytest.approx(stats.median, rel=0.2) for s in stats.samples)


def test_fast_batches_are_enlarged(monkeypatch):
    # pretend the clock ticks every 10 us: batches must then last >= 1 ms
    monkeypatch.setattr(timing, "clock_resolution", lambda: 1e-5)
    stats = time_predict(BusyWait(), np.zeros((10, 2)), repetitions=3)
    assert stats.enlarged and stats.batch_size >= 1000
    assert stats.median == pytest.approx(1.0, rel=0.2)


def test_interleaved_timing_keeps_models_apart():
    out = time_predict_interleaved({"fast": BusyWait(1e-6), "slow": BusyWait(4e-6)},
                                   np.zeros((500, 2)), repetitions=5)
    assert out["fast"].median == pytest.approx(1.0, rel=0.2)
    assert out["slow"].median == pytest.approx(4.0, rel=0.2)


def test_fit_timing_takes_the_median():
    calls = []

    def fake_fit(spec, data):
        calls.append(1)
        time.sleep(0.002)
        return "model"

    stats = time_fit(None, None, repetitions=3, fit_fn=fake_fit)
    assert len(calls) == 4                          # warm-up plus three timed fits
    assert stats.unit == "s" and stats.median >= 0.002


@pytest.mark.parametrize("fn", [
    lambda: time_predict(BusyWait(), np.zeros((10, 2)), repetitions=2),
    lambda: time_fit(None, None, repetitions=1, fit_fn=lambda s, d: None),
])
def test_too_few_repetitions(fn):
    with pytest.raises(ValueError):
        fn()
