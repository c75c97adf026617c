import csv
import json

import pytest

from iqbench.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL, main
from iqbench.config import OUTPUT_ENV, derived_seed, load_config, parse_config
from iqbench.errors import ConfigError

SMALL = {"generator": {"shots_per_class": 80},
         "bench": {"test_repetitions": 3, "train_repetitions": 3, "grid_resolution": 8}}


def config(tmp_path, **extra):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({**SMALL, **extra}))
    return str(p)


def test_generate_writes_all_shots(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["generate", "--out", str(out)]) == EXIT_OK
    lines = (out / "dataset.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 1250
    text = capsys.readouterr().out
    assert "Bayes-optimal accuracy 0.910000" in text and "centroid ground" in text


def test_same_seed_gives_identical_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = config(tmp_path)
    assert main(["generate", "--config", cfg, "--seed", "7", "--out", str(a)]) == EXIT_OK
    assert main(["generate", "--config", cfg, "--seed", "7", "--out", str(b)]) == EXIT_OK
    assert (a / "dataset.csv").read_bytes() == (b / "dataset.csv").read_bytes()
    main(["generate", "--config", cfg, "--seed", "8", "--out", str(b)])
    assert (a / "dataset.csv").read_bytes() != (b / "dataset.csv").read_bytes()


def test_invalid_decay_names_the_field(tmp_path, capsys):
    cfg = config(tmp_path, generator={"decay_prob": 1.5})
    assert main(["generate", "--config", cfg, "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    assert "decay_prob" in capsys.readouterr().err
    assert not (tmp_path / "x").exists()


@pytest.mark.parametrize("doc,needle", [
    ({"colour": 1}, "colour"),
    ({"bench": {"repeats": 3}}, "repeats"),
    ({"tuning": {"folds": 1}}, "folds"),
    ({"generator": {"sigma": 0.1, "noise": 2}}, "noise"),
    ({"models": ["linear_svm", "quantum_svm"]}, "quantum_svm"),
    ({"split": {"test_fraction": 1.0}}, "test_fraction"),
])
def test_config_validation(doc, needle):
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert needle in str(exc.value)


def test_toml_config_and_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "envout"))
    p = tmp_path / "c.toml"
    p.write_text('seed = 3\nmodels = ["naive_bayes"]\n[generator]\nshots_per_class = 50\n')
    cfg = load_config(p)
    assert cfg.seed == 3 and cfg.generator.shots_per_class == 50
    assert cfg.generator.seed == derived_seed(3, "generate")
    assert str(cfg.output_dir) == str(tmp_path / "envout")
    assert [s.kind.value for s in cfg.models] == ["naive_bayes"]


def test_derived_seeds():
    assert derived_seed(0, "split") == 605787361
    assert derived_seed(0, "generate") == 910648110
    assert len({derived_seed(0, s) for s in ("generate", "split", "tune", "fit")}) == 4


def test_missing_dataset_names_the_path(tmp_path, capsys):
    missing = tmp_path / "nowhere.csv"
    code = main(["train", "--config", config(tmp_path), "--data", str(missing),
                 "--out", str(tmp_path / "r")])
    assert code == EXIT_CONFIG
    assert str(missing) in capsys.readouterr().err


def test_bench_before_train(tmp_path, capsys):
    out = str(tmp_path / "r")
    cfg = config(tmp_path)
    main(["generate", "--config", cfg, "--out", out])
    assert main(["bench", "--config", cfg, "--out", out]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "no models found" in err and "iqbench train" in err


def test_untunable_model_has_no_tuning_log(tmp_path):
    out = tmp_path / "r"
    cfg = config(tmp_path)
    main(["generate", "--config", cfg, "--out", str(out)])
    assert main(["train", "--config", cfg, "--models", "fidelity_fit", "--out", str(out)]) == EXIT_OK
    assert [p.name for p in (out / "models").iterdir()] == ["fidelity_fit.json"]
    assert not (out / "tuning").exists()


def test_split_seed_mismatch(tmp_path, capsys):
    out = str(tmp_path / "r")
    cfg = config(tmp_path, models=["naive_bayes"])
    main(["generate", "--config", cfg, "--seed", "1", "--out", out])
    main(["train", "--config", cfg, "--seed", "1", "--out", out])
    code = main(["bench", "--config", cfg, "--seed", "2", "--out", out,
                 "--data", str(tmp_path / "r" / "dataset.csv")])
    assert code == EXIT_CONFIG
    assert "SplitSeedMismatch" in capsys.readouterr().err


def test_partial_failure_exit_code(tmp_path, capsys):
    out = str(tmp_path / "r")
    cfg = config(tmp_path, models=["naive_bayes", {"kind": "linear_svm",
                                                   "hyperparams": {"max_iter": 1, "C": 50.0}}])
    main(["generate", "--config", cfg, "--out", out])
    assert main(["train", "--config", cfg, "--out", out, "--no-tune"]) == EXIT_PARTIAL
    assert "FAILED linear_svm" in capsys.readouterr().err
    summary = json.loads((tmp_path / "r" / "train_summary.json").read_text())
    assert summary["models"]["linear_svm"]["status"] == "failed"
    assert main(["bench", "--config", cfg, "--out", out]) == EXIT_OK


def test_train_bench_report_cycle(tmp_path, capsys):
    out = tmp_path / "r"
    cfg = config(tmp_path, models=["naive_bayes", "fidelity_fit", "adaboost"],
                 tuning={"folds": 2})
    spaces = tmp_path / "spaces.json"
    spaces.write_text(json.dumps({"adaboost": {"n_estimators": {"values": [10, 20]}}}))
    doc = json.loads(open(cfg).read())
    doc["tuning"]["space_file"] = str(spaces)
    open(cfg, "w").write(json.dumps(doc))
    assert main(["run", "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert (out / "tuning" / "adaboost_trials.csv").exists()
    rows = list(csv.reader((out / "report" / "report.csv").open(encoding="utf-8")))
    assert [r[0] for r in rows[1:]] == ["Ada Boost", "Naive Bayes", "Fidelity Fit"]
    assert "| Ada Boost |" in capsys.readouterr().out
    # re-render into another directory from bench.json alone
    again = tmp_path / "again"
    assert main(["report", "--config", cfg, "--out", str(out), "--report-dir", str(again)]) == EXIT_OK
    assert (again / "report.csv").read_bytes() == (out / "report" / "report.csv").read_bytes()
    assert (again / "roc_ratio.csv").exists()


def test_report_without_bench(tmp_path, capsys):
    assert main(["report", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "run `iqbench bench` first" in capsys.readouterr().err


def test_unknown_model_flag(tmp_path, capsys):
    assert main(["train", "--models", "nope", "--out", str(tmp_path)]) == EXIT_CONFIG
