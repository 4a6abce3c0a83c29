"""End-to-end command-line chain in a temporary working directory.

Corrector epochs are cut down so the whole chain stays fast; the threshold
checks exercised here are the ones that hold at reduced training.
"""

import json
import subprocess
import sys

import pytest

from rramfault.cli import main
from rramfault.crossbar import load_arrays
from rramfault.mlp import load_params
from rramfault.reports import load_report


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Working directory after train-base and gen-corpus."""
    work = tmp_path_factory.mktemp("cli")
    config = {
        "kinds": ["checkerboard"],
        "architectures": ["MLP(1,)"],
        "corrector_training": {"epochs": 8, "patience": 4},
    }
    cfg = work / "config.json"
    cfg.write_text(json.dumps(config))
    assert main(["train-base", "--config", str(cfg), "--out", str(work)]) == 0
    assert main(["gen-corpus", "--config", str(cfg), "--out", str(work), "--check"]) == 0
    return work


def cfg_path(workdir):
    return str(workdir / "config.json")


def test_train_base_outputs(workdir):
    base = workdir / "baseline"
    params = load_params(base / "weights.json")
    assert [w.shape for w, _ in params] == [(64, 50), (50, 20), (20, 8), (8, 10)]
    arrays = load_arrays(base / "circuit.json")
    assert [a.shape for a in arrays] == [(65, 50), (51, 20), (21, 8), (9, 10)]
    metrics = json.loads((base / "metrics.json").read_text())
    assert metrics["format"] == "baseline-metrics/1"
    assert 0.9 <= metrics["test_accuracy"] <= 1.0
    assert metrics["circuit_accuracy_all_images"] > 0.9


def test_gen_corpus_outputs(workdir):
    corpus = workdir / "corpus"
    manifest = json.loads((corpus / "manifest.json").read_text())
    assert manifest["totals"]["rows"] == 150948
    assert len(list(corpus.glob("*.csv"))) == 21
    assert len(manifest["baseline_sha256"]) == 64


def test_layer_sweep_check(workdir):
    rc = main(["layer-sweep", "--config", cfg_path(workdir), "--out", str(workdir), "--check"])
    assert rc == 0
    payload = load_report(workdir / "reports" / "layer_sweep.json")
    assert len(payload["rows"]) == 168
    assert payload["summary"]["circle-4-L3"] < payload["summary"]["circle-4-L0"]


def test_same_defect_writes_reports(workdir):
    rc = main(["same-defect", "--config", cfg_path(workdir), "--out", str(workdir), "--check"])
    assert rc == 0
    payload = load_report(workdir / "reports" / "same_defect.json")
    assert set(payload["summary"]) == {"checkerboard"}
    assert payload["summary"]["checkerboard"] > 0
    assert (workdir / "reports" / "same_defect.csv").exists()


def test_cross_defect_diagonal_check(workdir):
    rc = main(["cross-defect", "--config", cfg_path(workdir), "--out", str(workdir), "--check"])
    assert rc == 0
    payload = load_report(workdir / "reports" / "cross_defect.json")
    assert set(payload["summary"]) == {"checkerboard->checkerboard"}


def test_ladder_smallest_net_fails_to_correct(workdir):
    rc = main(["ladder", "--config", cfg_path(workdir), "--out", str(workdir), "--check"])
    assert rc == 0
    payload = load_report(workdir / "reports" / "ladder.json")
    assert payload["summary"]["MLP(1,):checkerboard->checkerboard"] < 0


def test_report_reemission_is_byte_identical(workdir):
    src = workdir / "reports" / "same_defect"
    out_csv = workdir / "reports" / "re.csv"
    out_json = workdir / "reports" / "re.json"
    assert main(["report", "--in", str(src.with_suffix(".json")),
                 "--format", "csv", "--out", str(out_csv)]) == 0
    assert out_csv.read_bytes() == src.with_suffix(".csv").read_bytes()
    assert main(["report", "--in", str(src.with_suffix(".json")),
                 "--format", "json", "--out", str(out_json)]) == 0
    assert out_json.read_bytes() == src.with_suffix(".json").read_bytes()


def test_bad_config_exits_2(workdir, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kinds": ["spiral"]}')
    assert main(["same-defect", "--config", str(bad), "--out", str(tmp_path)]) == 2


def test_missing_corpus_exits_3(tmp_path):
    assert main(["same-defect", "--out", str(tmp_path)]) == 3


def test_unqualified_baseline_exits_4(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({
        "baseline_training": {"learning_rate": 1e-9, "epochs": 1},
        "max_restarts": 1,
    }))
    assert main(["train-base", "--config", str(cfg), "--out", str(tmp_path)]) == 4


def test_threshold_failure_exits_4(workdir, tmp_path):
    # an untrained corrector cannot reach the +20 pp circle threshold
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({
        "kinds": ["circle"],
        "corrector_training": {"epochs": 1, "learning_rate": 1e-12, "patience": 1},
    }))
    rc = main(["same-defect", "--config", str(cfg), "--out", str(tmp_path),
               "--corpus", str(workdir / "corpus"), "--check"])
    assert rc == 4


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rramfault", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "train-base" in proc.stdout
