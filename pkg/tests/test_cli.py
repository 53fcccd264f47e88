"""Command-line exit codes and the end-to-end synthetic workflow."""

import json
import shutil

import pytest

from tsgroups.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, build_parser, main


def write_config(directory, **overrides):
    run_dir = directory / "run"
    config = {
        "paths": {"out_dir": str(run_dir)},
        "ingest": {"seed": 3, "synthetic": {"windows_per_class": 12, "t": 20, "d": 3, "seed": 3}},
        "autoencoder": {"hidden1": 6, "hidden2": 3, "epochs": 4, "seed": 3},
        "cgf": {"tau": 0.05},
        "classifier": {"kind": "SOFTMAX_STATS", "epochs": 120, "seed": 3},
        "mapping": {"method": "AVG"},
        "train": {"baseline": True},
    }
    config.update(overrides)
    path = directory / "config.json"
    path.write_text(json.dumps(config))
    return path, run_dir


@pytest.fixture(scope="module")
def completed_run(tmp_path_factory):
    base = tmp_path_factory.mktemp("cliflow")
    config_path, run_dir = write_config(base)
    assert main(["ingest", "--config", str(config_path)]) == EXIT_OK
    assert main(["train", "--config", str(config_path)]) == EXIT_OK
    assert main(["infer", "--config", str(config_path)]) == EXIT_OK
    assert main(["report", "--out", str(run_dir)]) == EXIT_OK
    return config_path, run_dir


def test_parser_accepts_every_verb():
    parser = build_parser()
    assert parser.parse_args(["ingest", "--synthetic"]).command == "ingest"
    assert parser.parse_args(["train", "--epochs", "3"]).command == "train"
    assert parser.parse_args(["infer", "--mapping", "CR_CR"]).command == "infer"
    assert parser.parse_args(["report", "--out", "somewhere"]).command == "report"
    assert parser.parse_args(["gradcheck", "--seeds", "2"]).command == "gradcheck"
    assert parser.parse_args(["selftest"]).command == "selftest"


def test_missing_command_is_a_usage_error():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_unknown_config_section_exits_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"paths": {"out_dir": str(tmp_path / "r")}, "bogus": {}}))
    assert main(["ingest", "--config", str(path)]) == EXIT_CONFIG


def test_unknown_key_in_section_exits_config(tmp_path):
    config_path, _ = write_config(tmp_path)
    data = json.loads(config_path.read_text())
    data["ingest"]["mystery_knob"] = 1
    config_path.write_text(json.dumps(data))
    assert main(["ingest", "--config", str(config_path)]) == EXIT_CONFIG


def test_ingest_without_any_source_exits_config(tmp_path):
    path = tmp_path / "none.json"
    path.write_text(json.dumps({"paths": {"out_dir": str(tmp_path / "r")}}))
    assert main(["ingest", "--config", str(path)]) == EXIT_CONFIG


def test_infer_without_artifacts_exits_io(tmp_path):
    config_path, run_dir = write_config(tmp_path)
    run_dir.mkdir()
    assert main(["infer", "--config", str(config_path)]) == EXIT_IO


def test_report_on_missing_directory_exits_io(tmp_path):
    assert main(["report", "--out", str(tmp_path / "never_made")]) == EXIT_IO


def test_full_flow_writes_expected_artifacts(completed_run):
    _, run_dir = completed_run
    expected = [
        "train_dataset.zip", "test_dataset.zip", "ingest_report.json",
        "model.bin", "aecs_train.zip", "cgf_train.json", "bundle_grouped.zip",
        "bundle_baseline.zip", "manifest_ingest.json", "manifest_train.json",
        "manifest_infer.json", "aecs_test.zip", "cgf_test.json",
        "mapping_avg.json", "mapping_cr_cr.json", "predictions.csv",
        "metrics.json", "infer_report.json", "composition_train.csv",
        "pca_train.csv", "hubert_scores.csv", "mapping_summary.csv",
        "report_summary.json",
    ]
    for name in expected:
        assert (run_dir / name).is_file(), name


def test_full_flow_outputs_parse(completed_run):
    _, run_dir = completed_run
    metrics = json.loads((run_dir / "metrics.json").read_text())
    assert 0.0 <= metrics["accuracy"] <= 1.0
    assert 0.0 <= metrics["f1_macro"] <= 1.0
    header = (run_dir / "predictions.csv").read_text().splitlines()[0]
    assert header.startswith("instance_index,predicted")
    infer_report = json.loads((run_dir / "infer_report.json").read_text())
    assert "baseline" in infer_report and "delta_f1_macro" in infer_report
    summary = json.loads((run_dir / "report_summary.json").read_text())
    assert summary["notices"] == []
    assert len(summary["written"]) == 5


def test_seed_override_lands_in_manifest(tmp_path):
    config_path, _ = write_config(tmp_path)
    other = tmp_path / "other_run"
    code = main(["ingest", "--config", str(config_path), "--out", str(other), "--seed", "11"])
    assert code == EXIT_OK
    manifest = json.loads((other / "manifest_ingest.json").read_text())
    assert manifest["config"]["ingest"]["seed"] == 11
    assert manifest["config"]["autoencoder"]["seed"] == 11


def test_corrupt_model_exits_io(completed_run, tmp_path):
    config_path, run_dir = completed_run
    copy = tmp_path / "copy"
    shutil.copytree(run_dir, copy)
    model_path = copy / "model.bin"
    blob = bytearray(model_path.read_bytes())
    blob[len(blob) // 2] ^= 0xFF
    model_path.write_bytes(bytes(blob))
    assert main(["infer", "--config", str(config_path), "--out", str(copy)]) == EXIT_IO


def test_gradcheck_verb(capsys):
    assert main(["gradcheck", "--seeds", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert payload["results"][0]["max_relative_error"] < payload["threshold"]


def test_selftest_verb(capsys):
    assert main(["selftest"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert all(payload["suites"].values())
