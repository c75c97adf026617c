"""Wall-clock train and test latency.

Timed regions are serialised through a process-wide lock, run with the
garbage collector paused and BLAS pools limited to one thread, and are
preceded by an untimed warm-up call. Reported values are medians.
"""

from __future__ import annotations

import gc
import statistics
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from ..classifiers import fit as default_fit

DEFAULT_REPETITIONS = 11
MIN_REPETITIONS = 3
RESOLUTION_FACTOR = 100

_TIMED_REGION = threading.Lock()


def clock_resolution() -> float:
    return time.get_clock_info("perf_counter").resolution


@contextmanager
def timed_region():
    """Own the thread for the duration of a measurement."""
    with _TIMED_REGION, threadpool_limits(limits=1):
        was_enabled = gc.isenabled()
        gc.disable()
        try:
            yield
        finally:
            if was_enabled:
                gc.enable()


@dataclass(frozen=True)
class TimingStats:
    median: float
    samples: tuple
    unit: str
    batch_size: int = 1
    enlarged: bool = False

    @property
    def spread(self) -> float:
        return max(self.samples) - min(self.samples)


def _check_reps(repetitions):
    if repetitions < MIN_REPETITIONS:
        raise ValueError(f"need at least {MIN_REPETITIONS} repetitions, got {repetitions}")


def time_fit(spec, data, repetitions: int = 3, fit_fn=None) -> TimingStats:
    """Median seconds per complete fit of ``spec`` on ``data`` (warm-up excluded)."""
    return timed_fit(spec, data, repetitions, fit_fn)[1]


def timed_fit(spec, data, repetitions: int = 3, fit_fn=None, warmup: bool = True):
    """Like :func:`time_fit` but also return the model of the last repetition.

    ``warmup=False`` skips the untimed first fit; use it only when the same
    kind of model was already fitted in this process (compiled kernels and
    caches are warm).
    """
    _check_reps(repetitions)
    fit_fn = fit_fn or default_fit
    samples = []
    model = None
    with timed_region():
        if warmup:
            fit_fn(spec, data)
        for _ in range(repetitions):
            t0 = time.perf_counter()
            model = fit_fn(spec, data)
            samples.append(time.perf_counter() - t0)
    return model, TimingStats(statistics.median(samples), tuple(samples), "s")


def time_predict(model, points, repetitions: int = DEFAULT_REPETITIONS) -> TimingStats:
    """Median microseconds per shot of one batch ``predict`` over ``points``.

    If a batch runs in less than 100 clock ticks the batch is tiled until it
    does not; the enlarged size is recorded in the result.
    """
    _check_reps(repetitions)
    batch = np.ascontiguousarray(points, dtype=np.float64)
    floor = RESOLUTION_FACTOR * clock_resolution()
    enlarged = False
    samples = []
    with timed_region():
        while True:
            t0 = time.perf_counter()
            model.predict(batch)           # warm-up, also probes the batch duration
            if time.perf_counter() - t0 >= floor or len(batch) >= 1 << 24:
                break
            batch = np.concatenate([batch, batch])
            enlarged = True
        n = len(batch)
        for _ in range(repetitions):
            t0 = time.perf_counter()
            model.predict(batch)
            samples.append((time.perf_counter() - t0) / n * 1e6)
    return TimingStats(statistics.median(samples), tuple(samples), "us/shot", n, enlarged)


def time_predict_interleaved(models: dict, points, repetitions: int = DEFAULT_REPETITIONS) -> dict:
    """:func:`time_predict` for several models, one batch each per round.

    Rounds visit the models in turn, so slow drifts of the host (frequency
    scaling, noisy neighbours) hit every model alike instead of whichever
    one happened to be measured at the time. Returns name -> TimingStats.
    """
    _check_reps(repetitions)
    base = np.ascontiguousarray(points, dtype=np.float64)
    floor = RESOLUTION_FACTOR * clock_resolution()
    batches, samples = {}, {}
    with timed_region():
        for name, model in models.items():
            batch = base
            while True:
                t0 = time.perf_counter()
                model.predict(batch)
                if time.perf_counter() - t0 >= floor or len(batch) >= 1 << 24:
                    break
                batch = np.concatenate([batch, batch])
            batches[name] = batch
            samples[name] = []
        for _ in range(repetitions):
            for name, model in models.items():
                batch = batches[name]
                t0 = time.perf_counter()
                model.predict(batch)
                samples[name].append((time.perf_counter() - t0) / len(batch) * 1e6)
    return {name: TimingStats(statistics.median(s), tuple(s), "us/shot", len(batches[name]),
                              len(batches[name]) > len(base))
            for name, s in samples.items()}
