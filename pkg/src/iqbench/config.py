"""Run configuration for the command-line pipeline.

A config file is JSON or TOML with these top-level keys (all optional)::

    seed = 0                     # pipeline seed; stage seeds derive from it
    output_dir = "iqbench-run"   # default: $IQBENCH_OUT or ./iqbench-run
    models = "all"               # or a list of kinds / {kind, hyperparams} tables
    standardize = false

    [generator]                  # CloudParams fields; seed derived unless given
    [split]       test_fraction = 0.25
    [tuning]      enabled, models, folds, grid_cap, space_file,
                  n_initial, eta, max_resource, validation_fraction
    [bench]       test_repetitions, train_repetitions, grid_resolution

Unknown keys anywhere are rejected before any work starts.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classifiers import ALL_KINDS, ClassifierSpec, Kind
from .errors import ConfigError, IQBenchError
from .synthgen import CloudParams

try:
    import tomllib
except ModuleNotFoundError:      # Python < 3.11
    import tomli as tomllib

OUTPUT_ENV = "IQBENCH_OUT"
DEFAULT_OUTPUT = "iqbench-run"
TUNABLE = (Kind.ADABOOST, Kind.RANDOM_FOREST, Kind.RBF_SVM, Kind.NEURAL_NET)


def derived_seed(seed: int, stage: str) -> int:
    """Stage seed: first 4 bytes of ``sha256("<stage>:<seed>")``."""
    digest = hashlib.sha256(f"{stage}:{int(seed)}".encode()).digest()
    return int.from_bytes(digest[:4], "big") & 0x7FFFFFFF


def _check_keys(section: str, d, allowed):
    if not isinstance(d, dict):
        raise ConfigError(f"[{section}] must be a table, got {type(d).__name__}")
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")


@dataclass(frozen=True)
class TuningConfig:
    enabled: bool = True
    models: tuple = TUNABLE
    folds: int = 5
    grid_cap: int = 10_000
    space_file: str | None = None
    n_initial: int = 27
    eta: int = 3
    max_resource: int = 27
    validation_fraction: float = 0.2

    def validate(self):
        if self.folds < 2:
            raise ConfigError("tuning.folds must be >= 2")
        if self.eta < 2 or (self.n_initial < self.eta and self.n_initial != 1):
            raise ConfigError("tuning needs n_initial >= eta >= 2")
        if self.max_resource < 1:
            raise ConfigError("tuning.max_resource must be >= 1")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ConfigError("tuning.validation_fraction must lie in (0, 1)")
        for k in self.models:
            if k not in TUNABLE:
                raise ConfigError(f"tuning.models: {k.value} has no search space")


@dataclass(frozen=True)
class BenchConfig:
    test_repetitions: int = 11
    train_repetitions: int = 3
    grid_resolution: int = 100

    def validate(self):
        if self.test_repetitions < 3 or self.train_repetitions < 3:
            raise ConfigError("bench repetitions must be >= 3")
        if self.grid_resolution < 2:
            raise ConfigError("bench.grid_resolution must be >= 2")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    generator: CloudParams = None
    test_fraction: float = 0.25
    models: tuple = ()
    standardize: bool = False
    tuning: TuningConfig = field(default_factory=TuningConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)
    output_dir: Path = None
    _explicit_generator_seed: bool = field(default=False, repr=False)

    @property
    def split_seed(self) -> int:
        return derived_seed(self.seed, "split")

    @property
    def tune_seed(self) -> int:
        return derived_seed(self.seed, "tune")

    def model_specs(self) -> list[ClassifierSpec]:
        fit_seed = derived_seed(self.seed, "fit")
        return [ClassifierSpec(s.kind, dict(s.hyperparams), fit_seed, self.standardize)
                for s in self.models]

    def with_overrides(self, seed=None, output_dir=None) -> "RunConfig":
        cfg = self
        if seed is not None:
            gen = cfg.generator
            if not cfg._explicit_generator_seed:
                gen = replace(gen, seed=derived_seed(seed, "generate"))
            cfg = replace(cfg, seed=int(seed), generator=gen)
        if output_dir is not None:
            cfg = replace(cfg, output_dir=Path(output_dir))
        return cfg

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "output_dir": str(self.output_dir),
            "models": [s.to_dict() for s in self.models],
            "standardize": self.standardize,
            "generator": self.generator.to_dict(),
            "split": {"test_fraction": self.test_fraction, "seed": self.split_seed},
            "tuning": {**self.tuning.__dict__, "models": [k.value for k in self.tuning.models]},
            "bench": dict(self.bench.__dict__),
        }


def _parse_models(raw) -> tuple:
    if raw == "all":
        return tuple(ClassifierSpec(k) for k in ALL_KINDS)
    if isinstance(raw, str):
        raw = [raw]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("models must be \"all\" or a non-empty list")
    specs = []
    for item in raw:
        if isinstance(item, str):
            specs.append(ClassifierSpec(Kind(item)))
        elif isinstance(item, dict):
            _check_keys("models", item, ("kind", "hyperparams"))
            specs.append(ClassifierSpec(Kind(item["kind"]), dict(item.get("hyperparams", {}))))
        else:
            raise ConfigError(f"bad model entry {item!r}")
    kinds = [s.kind for s in specs]
    if len(set(kinds)) != len(kinds):
        raise ConfigError("each model kind may be listed once")
    return tuple(specs)


def parse_config(doc: dict) -> RunConfig:
    """Validate a whole config document; errors name the offending key."""
    try:
        return _parse(doc)
    except ConfigError:
        raise
    except (IQBenchError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def _parse(doc: dict) -> RunConfig:
    _check_keys("config", doc, ("seed", "output_dir", "models", "standardize", "generator",
                                "split", "tuning", "bench"))
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    gen_doc = dict(doc.get("generator", {}))
    explicit = "seed" in gen_doc
    gen_doc.setdefault("seed", derived_seed(seed, "generate"))
    generator = CloudParams.from_dict(gen_doc)

    split_doc = doc.get("split", {})
    _check_keys("split", split_doc, ("test_fraction",))
    test_fraction = float(split_doc.get("test_fraction", 0.25))
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"split.test_fraction must lie in (0, 1), got {test_fraction}")

    tdoc = dict(doc.get("tuning", {}))
    _check_keys("tuning", tdoc, TuningConfig.__dataclass_fields__)
    if "models" in tdoc:
        tdoc["models"] = tuple(Kind(k) for k in tdoc["models"])
    tuning = TuningConfig(**tdoc)
    tuning.validate()

    bdoc = doc.get("bench", {})
    _check_keys("bench", bdoc, BenchConfig.__dataclass_fields__)
    bench = BenchConfig(**bdoc)
    bench.validate()

    out = doc.get("output_dir") or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    return RunConfig(seed=seed, generator=generator, test_fraction=test_fraction,
                     models=_parse_models(doc.get("models", "all")),
                     standardize=bool(doc.get("standardize", False)), tuning=tuning, bench=bench,
                     output_dir=Path(out), _explicit_generator_seed=explicit)


def load_config(path=None) -> RunConfig:
    if path is None:
        return parse_config({})
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        doc = tomllib.loads(raw.decode("utf-8")) if path.suffix == ".toml" else json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return parse_config(doc)
