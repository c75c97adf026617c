"""Generate -> train -> bench stages operating on an output directory.

Layout of ``output_dir``::

    dataset.csv, generator.json     synthetic shots and the parameters used
    models/<kind>.json              fitted models (metadata carries the split seed)
    tuning/<kind>_trials.csv        one row per tuning trial
    train_summary.json              per-model status, tuning winner, train time
    bench.json                      raw benchmark results (records, ROC, grids)
    report/                         report.md, report.csv, ROC/grid CSVs, SVGs
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import platform
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numba
import numpy as np
import scipy
from threadpoolctl import threadpool_limits

from . import __version__
from .classifiers import DISPLAY_NAMES, Kind, TrainedModel, load_model, save_model
from .config import RunConfig
from .errors import ConfigError, IOFailure, IQBenchError, SplitSeedMismatch
from .evalbench import (BenchmarkRecord, BoundaryGrid, RocCurve, auc, bbox_from_points,
                        boundary_grid, evaluate, render_report, roc, timed_fit)
from .evalbench.timing import clock_resolution, time_predict_interleaved
from .iqcore import Dataset, load_csv, save_csv, split
from .synthgen import bayes_optimal_accuracy, generate
from .tuner import grid_search, load_spaces, successive_halving

log = logging.getLogger("iqbench")

DATASET = "dataset.csv"
MODELS = "models"
BENCH = "bench.json"
REPORT = "report"


@dataclass
class StageOutcome:
    ok: list = field(default_factory=list)
    failed: dict = field(default_factory=dict)      # name -> error message
    paths: list = field(default_factory=list)

    @property
    def partial_failure(self) -> bool:
        return bool(self.failed)


def _write_text(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_dataset(path) -> Dataset:
    path = Path(path)
    if not path.is_file():
        raise IOFailure(f"dataset not found: {path}")
    try:
        return load_csv(path)
    except OSError as exc:
        raise IOFailure(f"cannot read dataset {path}: {exc.strerror}") from exc


# ----------------------------------------------------------------- generate

def run_generate(cfg: RunConfig) -> tuple[Path, dict]:
    data = generate(cfg.generator)
    out = Path(cfg.output_dir)
    path = out / DATASET
    try:
        out.mkdir(parents=True, exist_ok=True)
        save_csv(data, path)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror}") from exc
    _write_text(out / "generator.json", _dump(cfg.generator.to_dict()))
    counts = data.class_counts()
    summary = {
        "path": str(path),
        "shots": len(data),
        "ground": counts[0],
        "excited": counts[1],
        "centroid_ground": data.centroid(0).tolist(),
        "centroid_excited": data.centroid(1).tolist(),
        "bayes_optimal_accuracy": bayes_optimal_accuracy(cfg.generator),
    }
    return path, summary


# -------------------------------------------------------------------- train

def _tune(cfg: RunConfig, spec, train: Dataset, spaces, out: Path):
    kind = spec.kind
    space = spaces[kind]
    space = replace(space, fixed={**dict(spec.hyperparams), **space.fixed}) if spec.hyperparams else space
    seed = cfg.tune_seed
    if kind is Kind.NEURAL_NET:
        t = cfg.tuning
        res = successive_halving(space, train, t.n_initial, t.eta, t.max_resource, seed,
                                 validation_fraction=t.validation_fraction,
                                 standardize=cfg.standardize)
    else:
        res = grid_search(space, train, cfg.tuning.folds, seed, cfg.tuning.grid_cap, cfg.standardize)
    _write_text(out / "tuning" / f"{kind.value}_trials.csv", res.log_csv())
    n_failed = sum(not t.ok for t in res.trials)
    info = {"method": res.method, "score": res.best_score, "trials": len(res.trials),
            "failed_trials": n_failed, "best": dict(res.best.hyperparams)}
    best = type(spec)(kind, dict(res.best.hyperparams), spec.seed, spec.standardize)
    return best, info


def run_train(cfg: RunConfig, data_path=None) -> StageOutcome:
    out = Path(cfg.output_dir)
    data_path = Path(data_path) if data_path else out / DATASET
    data = load_dataset(data_path)
    digest = file_digest(data_path)
    parts = split(data, cfg.test_fraction, cfg.split_seed)
    spaces = load_spaces(cfg.tuning.space_file) if cfg.tuning.enabled else {}
    outcome = StageOutcome()
    summary = {"seed": cfg.seed, "split_seed": cfg.split_seed, "test_fraction": cfg.test_fraction,
               "dataset": str(data_path), "dataset_sha256": digest, "models": {}}
    model_dir = out / MODELS
    model_dir.mkdir(parents=True, exist_ok=True)
    for spec in cfg.model_specs():
        name = spec.kind.value
        entry = {"status": "ok"}
        try:
            with threadpool_limits(limits=1):
                tuned = cfg.tuning.enabled and spec.kind in cfg.tuning.models and spec.kind in spaces
                if tuned:
                    log.info("tuning %s", name)
                    spec, entry["tuning"] = _tune(cfg, spec, parts.train, spaces, out)
                log.info("fitting %s", name)
                model, stats = timed_fit(spec, parts.train, cfg.bench.train_repetitions,
                                         warmup=not tuned)
            meta = {**dict(model.metadata), "split_seed": cfg.split_seed,
                    "test_fraction": cfg.test_fraction, "dataset_sha256": digest,
                    "train_time_s": stats.median, "train_time_samples": list(stats.samples)}
            model = replace(model, metadata=meta)
            path = model_dir / f"{name}.json"
            save_model(model, path)
            entry.update(spec=spec.to_dict(), path=str(path), train_time_s=stats.median)
            outcome.ok.append(name)
            outcome.paths.append(path)
        except IQBenchError as exc:
            if isinstance(exc, IOFailure):
                raise
            log.error("%s failed: %s", name, exc)
            entry = {"status": "failed", "error": f"{type(exc).__name__}: {exc}"}
            outcome.failed[name] = entry["error"]
        summary["models"][name] = entry
    _write_text(out / "train_summary.json", _dump(summary))
    return outcome


# -------------------------------------------------------------------- bench

def environment(cfg: RunConfig) -> dict:
    return {
        "host": platform.node(),
        "platform": platform.platform(),
        "machine": platform.machine(),
        "cpu_count": os.cpu_count(),
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "iqbench": __version__,
        "seed": cfg.seed,
        "split_seed": cfg.split_seed,
        "test_fraction": cfg.test_fraction,
        "standardize": cfg.standardize,
        "timing": {"threads": 1, "test_repetitions": cfg.bench.test_repetitions,
                   "train_repetitions": cfg.bench.train_repetitions,
                   "clock_resolution_s": clock_resolution(), "statistic": "median",
                   "test_time_scope": "scoring only"},
        "positive_class": "Excited",
    }


def find_models(out: Path) -> dict:
    model_dir = Path(out) / MODELS
    files = sorted(model_dir.glob("*.json")) if model_dir.is_dir() else []
    if not files:
        raise IOFailure(f"no models found in {model_dir}; run `iqbench train` first")
    models = {}
    for f in files:
        try:
            m = load_model(f)
        except (OSError, ValueError, KeyError) as exc:
            raise IOFailure(f"cannot load model {f}: {exc}") from exc
        models[m.kind] = m
    return {k: models[k] for k in DISPLAY_NAMES if k in models}


def check_split(model: TrainedModel, cfg: RunConfig, digest: str):
    meta = model.metadata
    if meta.get("split_seed") != cfg.split_seed or meta.get("test_fraction") != cfg.test_fraction:
        raise SplitSeedMismatch(
            f"{model.kind.value} was trained with split seed {meta.get('split_seed')} "
            f"(test fraction {meta.get('test_fraction')}), config gives {cfg.split_seed} "
            f"({cfg.test_fraction}); retrain or use the training seed")
    if meta.get("dataset_sha256") not in (None, digest):
        raise ConfigError(f"{model.kind.value} was trained on a different dataset file")


def run_bench(cfg: RunConfig, data_path=None) -> StageOutcome:
    out = Path(cfg.output_dir)
    models = find_models(out)
    data_path = Path(data_path) if data_path else out / DATASET
    data = load_dataset(data_path)
    digest = file_digest(data_path)
    for m in models.values():
        check_split(m, cfg, digest)
    test = split(data, cfg.test_fraction, cfg.split_seed).test
    bbox = bbox_from_points(data.points)
    outcome = StageOutcome()
    records, curves, grids = [], {}, {}
    results = {}
    for kind, model in models.items():
        name = DISPLAY_NAMES[kind]
        try:
            counts, acc = evaluate(model, test)
            curve = roc(model.roc_scores(test.points), test.labels)
            grid = boundary_grid(model, bbox, cfg.bench.grid_resolution)
        except IQBenchError as exc:
            log.error("%s failed: %s", name, exc)
            outcome.failed[name] = f"{type(exc).__name__}: {exc}"
            continue
        results[name] = (model, counts, acc, curve, grid)
    # timing last, all models in one interleaved session
    timings = time_predict_interleaved({n: r[0] for n, r in results.items()}, test.points,
                                       cfg.bench.test_repetitions)
    for name, (model, counts, acc, curve, grid) in results.items():
        timing = timings[name]
        env = {"kind": model.kind.value, "hyperparams": dict(model.spec.hyperparams),
               "timing_batch": timing.batch_size, "timing_batch_enlarged": timing.enlarged,
               "train_time_samples_s": model.metadata.get("train_time_samples"),
               "test_time_samples_us": list(timing.samples)}
        records.append(BenchmarkRecord(name, acc, timing.median,
                                       float(model.metadata.get("train_time_s", 0.0)),
                                       counts.tpr, counts.fpr, auc(curve), env))
        curves[name] = curve
        grids[name] = grid
        outcome.ok.append(name)
    if not records:
        raise IQBenchError(f"every model failed to benchmark: {outcome.failed}")
    bench = {
        "environment": environment(cfg),
        "failed": outcome.failed,
        "records": [{**{k: getattr(r, k) for k in ("name", "accuracy", "test_time_us_per_shot",
                                                   "train_time_s", "tpr", "fpr", "auc")},
                     "environment": r.environment} for r in records],
        "curves": {n: {"fpr": c.fpr.tolist(), "tpr": c.tpr.tolist(),
                       "thresholds": c.thresholds.tolist(), "n_pos": c.n_pos, "n_neg": c.n_neg}
                   for n, c in curves.items()},
        "grids": {n: {"i": g.i_values.tolist(), "q": g.q_values.tolist(),
                      "labels": g.labels.tolist(),
                      "proba": None if g.proba is None else g.proba.tolist()}
                  for n, g in grids.items()},
        "test_points": test.points.tolist(),
        "test_labels": test.labels.tolist(),
    }
    _write_text(out / BENCH, json.dumps(bench) + "\n")
    outcome.paths = render_bench(bench, out / REPORT)
    return outcome


def render_bench(bench: dict, out_dir) -> list:
    """Render the report bundle from a ``bench.json`` document."""
    records = [BenchmarkRecord(**r) for r in bench["records"]]
    curves = {n: RocCurve(np.array(c["fpr"]), np.array(c["tpr"]), np.array(c["thresholds"]),
                          c["n_pos"], c["n_neg"]) for n, c in bench["curves"].items()}
    grids = {n: BoundaryGrid(np.array(g["i"]), np.array(g["q"]), np.array(g["labels"], dtype=np.int8),
                             None if g["proba"] is None else np.array(g["proba"]))
             for n, g in bench["grids"].items()}
    try:
        return render_report(records, curves, grids, out_dir, bench.get("environment"),
                             np.array(bench["test_points"]), np.array(bench["test_labels"]))
    except OSError as exc:
        raise IOFailure(f"cannot write report to {out_dir}: {exc}") from exc


def run_report(cfg: RunConfig, bench_path=None, out_dir=None) -> list:
    out = Path(cfg.output_dir)
    bench_path = Path(bench_path) if bench_path else out / BENCH
    if not bench_path.is_file():
        raise IOFailure(f"no benchmark results at {bench_path}; run `iqbench bench` first")
    bench = json.loads(bench_path.read_text(encoding="utf-8"))
    return render_bench(bench, Path(out_dir) if out_dir else out / REPORT)
