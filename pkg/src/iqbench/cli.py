"""``iqbench`` command line.

Subcommands ``generate``, ``train``, ``bench``, ``report`` and ``run`` (all
three stages). Exit status: 0 success, 1 some model failed, 2 configuration
or I/O error. The default output directory is ``$IQBENCH_OUT`` or
``./iqbench-run``; ``--out`` overrides both.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import __version__, pipeline
from .classifiers import ClassifierSpec, Kind
from .config import load_config
from .errors import ConfigError, IQBenchError

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML run configuration")
    common.add_argument("--seed", type=int, help="pipeline seed (overrides the config)")
    common.add_argument("--out", help="output directory (overrides config and $IQBENCH_OUT)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    p = argparse.ArgumentParser(prog="iqbench", description="Qubit readout discrimination benchmark")
    p.add_argument("--version", action="version", version=f"iqbench {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="write a synthetic IQ dataset")
    tr = sub.add_parser("train", parents=[common], help="tune and fit classifiers")
    tr.add_argument("--data", help="dataset CSV (default: <out>/dataset.csv)")
    tr.add_argument("--models", help="comma-separated kinds, or 'all'")
    tr.add_argument("--no-tune", action="store_true", help="fit default hyperparameters")
    be = sub.add_parser("bench", parents=[common], help="evaluate trained models and write the report")
    be.add_argument("--data", help="dataset CSV (default: <out>/dataset.csv)")
    rp = sub.add_parser("report", parents=[common], help="re-render the report from bench.json")
    rp.add_argument("--bench", help="bench.json to render (default: <out>/bench.json)")
    rp.add_argument("--report-dir", help="where to write (default: <out>/report)")
    run = sub.add_parser("run", parents=[common], help="generate, train and bench in one go")
    run.add_argument("--models", help="comma-separated kinds, or 'all'")
    run.add_argument("--no-tune", action="store_true", help="fit default hyperparameters")
    return p


def _config(args):
    cfg = load_config(args.config).with_overrides(seed=args.seed, output_dir=args.out)
    if getattr(args, "models", None):
        if args.models == "all":
            kinds = list(Kind)
        else:
            try:
                kinds = [Kind(k.strip()) for k in args.models.split(",") if k.strip()]
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if not kinds:
            raise ConfigError("--models selects no model")
        cfg = replace(cfg, models=tuple(ClassifierSpec(k) for k in kinds))
    if getattr(args, "no_tune", False):
        cfg = replace(cfg, tuning=replace(cfg.tuning, enabled=False))
    return cfg


def _report_failures(outcome) -> int:
    for name, err in outcome.failed.items():
        print(f"FAILED {name}: {err}", file=sys.stderr)
    return EXIT_PARTIAL if outcome.partial_failure else EXIT_OK


def cmd_generate(cfg) -> int:
    path, summary = pipeline.run_generate(cfg)
    print(f"wrote {summary['shots']} shots to {path}")
    print(f"  ground {summary['ground']}, excited {summary['excited']}")
    print("  centroid ground  ({:.6f}, {:.6f})".format(*summary["centroid_ground"]))
    print("  centroid excited ({:.6f}, {:.6f})".format(*summary["centroid_excited"]))
    print(f"  Bayes-optimal accuracy {summary['bayes_optimal_accuracy']:.6f}")
    return EXIT_OK


def cmd_train(cfg, data=None) -> int:
    outcome = pipeline.run_train(cfg, data)
    for p in outcome.paths:
        print(f"wrote {p}")
    return _report_failures(outcome)


def cmd_bench(cfg, data=None) -> int:
    outcome = pipeline.run_bench(cfg, data)
    report = cfg.output_dir / pipeline.REPORT / "report.md"
    print(report.read_text(encoding="utf-8"))
    print(f"report bundle in {report.parent}")
    return _report_failures(outcome)


def cmd_report(cfg, bench=None, report_dir=None) -> int:
    for p in pipeline.run_report(cfg, bench, report_dir):
        print(f"wrote {p}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        if args.command == "generate":
            return cmd_generate(cfg)
        if args.command == "train":
            return cmd_train(cfg, args.data)
        if args.command == "bench":
            return cmd_bench(cfg, args.data)
        if args.command == "report":
            return cmd_report(cfg, args.bench, args.report_dir)
        cmd_generate(cfg)
        code = cmd_train(cfg)
        return max(code, cmd_bench(cfg))
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IQBenchError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
