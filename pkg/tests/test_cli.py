import json
import math
import subprocess
import sys

import pytest

from pendulum_bell.cli import run
from pendulum_bell.runner import read_jsonl


def test_exact_presets():
    status, doc = run(["exact", "--preset", "paper-2sqrt2"])
    assert status == 0
    assert doc["E"]["exact"] == {"a": 0, "b": 2}
    assert doc["E"]["float"] == pytest.approx(2 * math.sqrt(2), abs=1e-15)
    status, doc = run(["exact", "--preset", "paper-max4"])
    assert doc["E"]["exact"] == {"a": 4, "b": 0}
    assert [c["exact"] for c in doc["correlators"]] == [{"a": -1, "b": 0}] * 3 + [{"a": 1, "b": 0}]


def test_exact_csv(tmp_path):
    run(["exact", "--preset", "paper-2sqrt2", "--csv", str(tmp_path / "c.csv")])
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0].startswith("adam_setting,eve_setting,sign")
    assert lines[4].split(",")[:3] == ["value", "shape", "-1"]


def test_simulate_writes_log(tmp_path):
    out = tmp_path / "log.jsonl"
    status, doc = run(["simulate", "--preset", "paper-2sqrt2", "--trials", "20000", "--seed", "3", "--out", str(out), "--workers", "2"])
    assert status == 0
    assert len(read_jsonl(out)) == 20000
    assert abs(doc["E"]["estimate"] - 2 * math.sqrt(2)) <= 4 * doc["E"]["uncertainty"]
    assert doc["trials"] == 20000 and doc["seed"] == 3


def test_simulate_blind(tmp_path):
    out = tmp_path / "log.jsonl"
    run(["simulate", "--preset", "paper-max4", "--trials", "100", "--seed", "3", "--out", str(out), "--blind"])
    first = json.loads(out.read_text().splitlines()[0])
    assert "card" not in first and "deck" not in first


def test_simulate_config_run_section(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"preset": "paper-max4", "run": {"seed": 9, "trial_count": 400}}))
    status, doc = run(["simulate", "--config", str(cfg)])
    assert status == 0 and doc["trials"] == 400 and doc["E"]["estimate"] == 4.0


def test_maximize_and_feed_witness_back(tmp_path):
    witness = tmp_path / "witness.json"
    status, doc = run(["maximize", "--witness-out", str(witness), "--probe", "20"])
    assert status == 0
    assert doc["best_E"]["exact"] == {"a": 4, "b": 0}
    assert doc["enumerated"] == 256
    assert float(doc["probe"]["best_E"]["float"]) <= 4
    status, again = run(["exact", "--config", str(witness)])
    assert status == 0 and again["E"]["exact"] == {"a": 4, "b": 0}


def test_check():
    status, doc = run(["check", "--preset", "paper-2sqrt2"])
    assert status == 0
    assert doc["no_signaling"]["no_signaling"] is True
    assert doc["measurement_dependence"]["mean_total_variation"]["exact"] == {"a": "1/2", "b": 0}
    assert doc["measurement_dependence"]["mutual_information_bits"] == pytest.approx(1.0, abs=1e-12)
    assert doc["local_bound"]["exact"] == {"a": 2, "b": 0}


@pytest.mark.parametrize(
    "argv, kind",
    [
        (["exact"], "usage"),
        (["bogus"], "usage"),
        (["exact", "--preset", "nope"], "usage"),
        (["simulate", "--preset", "paper-max4", "--trials", "1", "--seed", "1"], "under-sampled"),
        (["simulate", "--preset", "paper-max4", "--trials", "10", "--seed", "-1"], "config"),
        (["exact", "--config", "/nonexistent/cfg.json"], "FileNotFoundError"),
    ],
)
def test_errors_are_json(argv, kind):
    status, doc = run(argv)
    assert status == 1
    assert doc["error"]["type"] == kind


def test_validation_error_has_findings(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"model": {"decks": [[0.25] * 4] * 3 + [[0.3, 0.3, 0.3, 0]]}}))
    status, doc = run(["check", "--config", str(cfg)])
    assert status == 1
    assert doc["error"]["findings"][0]["location"] == "D4"


def test_console_entry_point_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "pendulum_bell", "exact", "--preset", "paper-max4"], capture_output=True, text=True)
    assert ok.returncode == 0 and "error" not in json.loads(ok.stdout)
    bad = subprocess.run([sys.executable, "-m", "pendulum_bell", "exact"], capture_output=True, text=True)
    assert bad.returncode == 1 and "error" in json.loads(bad.stdout)
