"""Hyperparameter search: exhaustive grid search scored by k-fold CV, and
one bracket of successive halving for the neural network.

Search spaces are plain JSON/TOML documents mapping a classifier kind to
its axes. An axis is either ``{"values": [...]}`` or
``{"range": [lo, hi], "type": "int" | "real", "points": n, "scale":
"linear" | "log"}``; ranges are discretised into ``points`` evenly spaced
values (log-spaced when ``scale`` is ``"log"``). An optional ``"fixed"``
mapping holds hyperparameters shared by every trial. The shipped defaults
live in ``spaces/default.json``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .classifiers import ClassifierSpec, Kind, fit
from .errors import ConfigError, GridTooLarge, IQBenchError, TuningFailed
from .evalbench.metrics import evaluate, kfold_cv
from .iqcore import Dataset, split

try:
    import tomllib
except ModuleNotFoundError:      # Python < 3.11
    import tomli as tomllib

DEFAULT_GRID_CAP = 10_000
DEFAULT_POINTS = 10


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    @classmethod
    def from_dict(cls, name, d):
        if not isinstance(d, dict):
            raise ConfigError(f"axis {name!r} must be a table, got {d!r}")
        unknown = set(d) - {"values", "range", "type", "points", "scale"}
        if unknown:
            raise ConfigError(f"axis {name!r}: unknown keys {sorted(unknown)}")
        if "values" in d:
            vals = tuple(d["values"])
            if not vals:
                raise ConfigError(f"axis {name!r} has no values")
            return cls(name, vals)
        if "range" not in d:
            raise ConfigError(f"axis {name!r} needs 'values' or 'range'")
        lo, hi = d["range"]
        points = int(d.get("points", DEFAULT_POINTS))
        kind = d.get("type", "real")
        scale = d.get("scale", "linear")
        return cls(name, discretize(lo, hi, points, kind, scale))

    def to_dict(self):
        return {"values": list(self.values)}


def discretize(lo, hi, points, kind="real", scale="linear") -> tuple:
    if points < 1 or lo > hi:
        raise ConfigError(f"bad range [{lo}, {hi}] with {points} points")
    if scale not in ("linear", "log") or kind not in ("int", "real"):
        raise ConfigError(f"unknown scale {scale!r} or type {kind!r}")
    if points == 1:
        grid = np.array([lo], dtype=np.float64)
    elif scale == "log":
        if lo <= 0:
            raise ConfigError("log-scaled ranges need a positive lower end")
        grid = np.geomspace(lo, hi, points)
        grid[0], grid[-1] = lo, hi
    else:
        grid = np.linspace(lo, hi, points)
    if kind == "int":
        return tuple(dict.fromkeys(int(round(v)) for v in grid))
    return tuple(float(v) for v in grid)


@dataclass(frozen=True)
class SearchSpace:
    kind: Kind
    axes: tuple
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not self.axes:
            raise ConfigError(f"search space for {self.kind.value} has no axes")
        # every value must validate on its own against the schema
        for ax in self.axes:
            for v in ax.values:
                ClassifierSpec(self.kind, {**self.fixed, ax.name: v})

    @classmethod
    def from_dict(cls, kind, d: dict) -> "SearchSpace":
        d = dict(d)
        fixed = dict(d.pop("fixed", {}))
        return cls(Kind(kind), tuple(Axis.from_dict(k, v) for k, v in d.items()), fixed)

    def to_dict(self) -> dict:
        out = {ax.name: ax.to_dict() for ax in self.axes}
        if self.fixed:
            out["fixed"] = dict(self.fixed)
        return out

    @property
    def size(self) -> int:
        return math.prod(len(ax.values) for ax in self.axes)

    def grid(self):
        """All points in row-major order (last axis varies fastest)."""
        names = [ax.name for ax in self.axes]
        for combo in itertools.product(*(ax.values for ax in self.axes)):
            yield dict(zip(names, combo))

    def sample(self, rng) -> dict:
        return {ax.name: ax.values[int(rng.integers(len(ax.values)))] for ax in self.axes}

    def spec(self, params, seed=0, standardize=False) -> ClassifierSpec:
        return ClassifierSpec(self.kind, {**self.fixed, **params}, seed, standardize)


def load_spaces(path=None) -> dict:
    """Read a JSON or TOML space file; ``None`` gives the shipped defaults."""
    if path is None:
        text = resources.files("iqbench").joinpath("spaces/default.json").read_text(encoding="utf-8")
        doc = json.loads(text)
    else:
        path = Path(path)
        raw = path.read_bytes()
        doc = tomllib.loads(raw.decode("utf-8")) if path.suffix == ".toml" else json.loads(raw)
    try:
        return {Kind(k): SearchSpace.from_dict(k, v) for k, v in doc.items()}
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class TrialResult:
    spec: ClassifierSpec
    validation_accuracy: float | None      # None when the trial failed
    resource_used: int
    wall_time: float
    error: str | None = None
    round: int = 0
    detail: tuple = ()

    def __post_init__(self):
        a = self.validation_accuracy
        if a is not None and not (0.0 <= a <= 1.0):
            raise ValueError(f"validation accuracy {a} outside [0, 1]")

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def score(self) -> float:
        return self.validation_accuracy if self.ok else -math.inf


@dataclass(frozen=True)
class SearchResult:
    best: ClassifierSpec
    best_score: float
    trials: tuple
    method: str

    def log_csv(self) -> str:
        return trial_log_csv(self.trials)


def trial_log_csv(trials) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["spec_hash", "params", "score", "budget", "wall_time"])
    for t in trials:
        w.writerow([t.spec.digest(), json.dumps(dict(t.spec.hyperparams), sort_keys=True),
                    format(t.score, ".17g"), t.resource_used, format(t.wall_time, ".17g")])
    return buf.getvalue()


def _best(trials):
    best = None
    for t in trials:
        if t.ok and (best is None or t.score > best.score):
            best = t
    if best is None:
        raise TuningFailed(f"all {len(trials)} trials failed; first error: {trials[0].error if trials else None}")
    return best


def grid_search(space: SearchSpace, train: Dataset, folds: int = 5, seed: int = 0,
                cap: int = DEFAULT_GRID_CAP, standardize: bool = False, fit_fn=None) -> SearchResult:
    """Score every grid point by k-fold CV accuracy on ``train``.

    Trials share the model seed and fold assignment, so they differ only in
    hyperparameters. A failing trial is recorded and skipped. Ties go to the
    earlier grid point.
    """
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    if space.size > cap:
        raise GridTooLarge(f"{space.kind.value}: {space.size} grid points exceed the cap of {cap}")
    trials = []
    for params in space.grid():
        spec = space.spec(params, seed, standardize)
        t0 = time.perf_counter()
        try:
            cv = kfold_cv(spec, train, k=folds, seed=seed, fit_fn=fit_fn)
            trials.append(TrialResult(spec, cv.mean, folds, time.perf_counter() - t0,
                                      detail=cv.fold_accuracies))
        except IQBenchError as exc:
            trials.append(TrialResult(spec, None, folds, time.perf_counter() - t0,
                                      error=f"{type(exc).__name__}: {exc}"))
    best = _best(trials)
    return SearchResult(best.spec, best.score, tuple(trials), "grid")


def halving_schedule(n_initial: int, eta: int, max_resource: int):
    """(configs, budget) per round of one successive-halving bracket.

    The bracket has ``s + 1`` rounds with ``s = min(floor(log_eta n_initial),
    floor(log_eta max_resource))``; round ``i`` runs ``floor(n_initial /
    eta^i)`` configurations for ``floor(max_resource * eta^(i - s))``
    units, so every round costs at most ``n_initial * max_resource /
    eta^s`` and the bracket at most ``n_initial * max_resource``.
    """
    if not (n_initial >= eta >= 2 or n_initial == 1) or eta < 2:
        raise ConfigError(f"need n_initial >= eta >= 2, got n_initial={n_initial}, eta={eta}")
    if max_resource < 1:
        raise ConfigError(f"max_resource must be >= 1, got {max_resource}")

    def ilog(x):
        s = 0
        while eta ** (s + 1) <= x:
            s += 1
        return s

    s = min(ilog(n_initial), ilog(max_resource))
    return [(n_initial // eta ** i, max_resource // eta ** (s - i)) for i in range(s + 1)]


def trial_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def successive_halving(space: SearchSpace, train: Dataset, n_initial: int = 27, eta: int = 3,
                       max_resource: int = 27, seed: int = 0, resource: str = "epochs",
                       validation_fraction: float = 0.2, standardize: bool = False,
                       fit_fn=None) -> SearchResult:
    """Sample ``n_initial`` configurations, then repeatedly train the
    survivors for a growing budget of ``resource`` units and keep the best
    ``1/eta`` by accuracy on a stratified validation slice of ``train``.

    Each round retrains from scratch with the configuration's own seed.
    Failed trials score ``-inf``; ties keep the earlier-sampled config.
    The winner's spec carries ``resource = max_resource``.
    """
    fit_fn = fit_fn or fit
    schedule = halving_schedule(n_initial, eta, max_resource)
    rng = np.random.default_rng(seed)
    configs = [space.sample(rng) for _ in range(n_initial)]
    seeds = [trial_seed(seed, k) for k in range(n_initial)]
    parts = split(train, validation_fraction, seed=seed, stratify=True)
    alive = list(range(n_initial))
    log = []
    best = None
    for rnd, (count, budget) in enumerate(schedule):
        alive = alive[:count]
        results = {}
        for k in alive:
            spec = space.spec({**configs[k], resource: budget}, seeds[k], standardize)
            t0 = time.perf_counter()
            try:
                model = fit_fn(spec, parts.train)
                _, acc = evaluate(model, parts.test)
                res = TrialResult(spec, acc, budget, time.perf_counter() - t0, round=rnd)
            except IQBenchError as exc:
                res = TrialResult(spec, None, budget, time.perf_counter() - t0,
                                  error=f"{type(exc).__name__}: {exc}", round=rnd)
            log.append(res)
            results[k] = res
        alive = sorted(alive, key=lambda k: (-results[k].score, k))
        best = results[alive[0]]
    if not best.ok:
        raise TuningFailed(f"every final-round trial failed: {best.error}")
    winner = space.spec({**dict(best.spec.hyperparams), resource: max_resource}, best.spec.seed, standardize)
    return SearchResult(winner, best.score, tuple(log), "successive_halving")


def spent_budget(trials) -> int:
    return sum(t.resource_used for t in trials)
