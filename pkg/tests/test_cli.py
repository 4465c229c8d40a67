"""CLI contract: exit codes, determinism, file outputs."""

import json
import os
import signal
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

BASE = [sys.executable, "-m", "adaptcha.cli"]


def run_cli(*args, timeout=120):
    return subprocess.run(
        BASE + list(args), capture_output=True, text=True, timeout=timeout
    )


SUBCOMMANDS = ["serve", "simulate", "train-classifier", "gen-challenge", "q-inspect", "metrics", "replay"]


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_exits_zero_and_lists_flags(sub):
    proc = run_cli(sub, "--help")
    assert proc.returncode == 0
    assert "--" in proc.stdout


def test_unknown_flag_is_usage_error():
    proc = run_cli("simulate", "--sessions", "5", "--frobnicate")
    assert proc.returncode == 2


def test_zero_sessions_is_usage_error():
    proc = run_cli("simulate", "--sessions", "0", "--seed", "1", "--out", "/tmp/x.json")
    assert proc.returncode == 2


def test_simulate_deterministic_bytes(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        jrn = tmp_path / f"{name}.jsonl"
        proc = run_cli("simulate", "--sessions", "150", "--seed", "11",
                       "--out", str(out), "--journal", str(jrn))
        assert proc.returncode == 0, proc.stderr
        outs.append((out.read_bytes(), jrn.read_bytes()))
    assert outs[0] == outs[1]


def test_metrics_matches_simulate_report(tmp_path):
    out = tmp_path / "r.json"
    jrn = tmp_path / "r.jsonl"
    assert run_cli("simulate", "--sessions", "120", "--seed", "3",
                   "--out", str(out), "--journal", str(jrn)).returncode == 0
    proc = run_cli("metrics", "--journal", str(jrn), "--json")
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == json.loads(out.read_text())


def test_replay_tolerates_truncated_journal(tmp_path):
    out = tmp_path / "r.json"
    jrn = tmp_path / "r.jsonl"
    run_cli("simulate", "--sessions", "40", "--seed", "5", "--out", str(out), "--journal", str(jrn))
    data = jrn.read_bytes()
    (tmp_path / "torn.jsonl").write_bytes(data[: len(data) - 25])
    proc = run_cli("replay", "--journal", str(tmp_path / "torn.jsonl"))
    assert proc.returncode == 0
    assert "replayed" in proc.stdout


def test_train_classifier_workflow(tmp_path):
    jrn = tmp_path / "r.jsonl"
    run_cli("simulate", "--sessions", "400", "--seed", "8",
            "--out", str(tmp_path / "r.json"), "--journal", str(jrn))
    model_path = tmp_path / "model.json"
    proc = run_cli("train-classifier", "--journal", str(jrn), "--seed", "2", "--out", str(model_path))
    assert proc.returncode == 0, proc.stderr
    assert "holdout f1" in proc.stdout
    doc = json.loads(model_path.read_text())
    assert doc["format"] == "adaptcha-svm"
    # determinism
    proc2 = run_cli("train-classifier", "--journal", str(jrn), "--seed", "2",
                    "--out", str(tmp_path / "model2.json"))
    assert proc2.returncode == 0
    assert model_path.read_bytes() == (tmp_path / "model2.json").read_bytes()


def test_train_classifier_single_class_fails_cleanly(tmp_path):
    pop = tmp_path / "pop.json"
    pop.write_text(json.dumps({"population": [{"kind": "human", "count": 1}]}))
    jrn = tmp_path / "h.jsonl"
    run_cli("simulate", "--population", str(pop), "--sessions", "30", "--seed", "1",
            "--out", str(tmp_path / "h.json"), "--journal", str(jrn))
    proc = run_cli("train-classifier", "--journal", str(jrn), "--out", str(tmp_path / "m.json"))
    assert proc.returncode == 1
    assert "error" in proc.stderr.lower()


def test_gen_challenge_grid_assets(tmp_path):
    out = tmp_path / "grid"
    proc = run_cli("gen-challenge", "--modality", "grid", "--level", "3", "--seed", "9",
                   "--out", str(out))
    assert proc.returncode == 0
    tiles = sorted(out.glob("tile_*.pgm"))
    assert len(tiles) == 9
    answer = json.loads((out / "answer.json").read_text())
    assert 3 <= len(answer["target_indices"]) <= 5
    # byte-identical on repeat
    out2 = tmp_path / "grid2"
    run_cli("gen-challenge", "--modality", "grid", "--level", "3", "--seed", "9", "--out", str(out2))
    for a, b in zip(tiles, sorted(out2.glob("tile_*.pgm"))):
        assert a.read_bytes() == b.read_bytes()


def test_gen_challenge_audio_assets(tmp_path):
    out = tmp_path / "audio"
    proc = run_cli("gen-challenge", "--modality", "audio", "--level", "1", "--seed", "2",
                   "--out", str(out))
    assert proc.returncode == 0
    assert (out / "challenge.wav").read_bytes()[:4] == b"RIFF"
    assert (out / "transcript.txt").read_text().strip()


def test_gen_challenge_bad_level_usage_error(tmp_path):
    proc = run_cli("gen-challenge", "--modality", "grid", "--level", "9", "--seed", "1",
                   "--out", str(tmp_path / "x"))
    assert proc.returncode == 2


def test_q_inspect_zero_table_notes_ties(tmp_path):
    from adaptcha.rl.qlearning import QTable
    from adaptcha.rl.store import save_qtable

    path = tmp_path / "q.json"
    path.write_bytes(save_qtable(QTable()))
    proc = run_cli("q-inspect", "--qtable", str(path))
    assert proc.returncode == 0
    lines = [ln for ln in proc.stdout.splitlines()[1:] if ln.strip()]
    assert len(lines) == 90
    assert all("tie(" in ln for ln in lines)


def test_q_inspect_malformed_file_fails_cleanly(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{}")
    proc = run_cli("q-inspect", "--qtable", str(path))
    assert proc.returncode == 1


def test_metrics_on_missing_file_fails_cleanly():
    proc = run_cli("metrics", "--journal", "/nonexistent.jsonl")
    assert proc.returncode == 1


def test_serve_healthz_and_clean_shutdown(tmp_path):
    config = tmp_path / "config.json"
    jrn = tmp_path / "serve.jsonl"
    config.write_text(json.dumps({
        "port": 0, "journal_path": str(jrn), "seed_mode": "fixed", "seed": 3,
    }))
    proc = subprocess.Popen(
        BASE + ["serve", "--config", str(config)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
    )
    try:
        line = proc.stdout.readline()
        assert "serving on" in line
        url = line.split("serving on ", 1)[1].split()[0]
        with urllib.request.urlopen(f"{url}/v1/healthz", timeout=10) as r:
            assert json.loads(r.read())["status"] == "ok"
        # make one session so the journal has content, then interrupt
        urllib.request.urlopen(
            urllib.request.Request(f"{url}/v1/session", data=b"", method="POST"), timeout=10
        )
        proc.send_signal(signal.SIGINT)
        assert proc.wait(timeout=15) == 0
    finally:
        if proc.poll() is None:
            proc.kill()
    # every journal line is complete JSON after the interrupt
    lines = jrn.read_text().splitlines()
    assert lines
    for ln in lines:
        json.loads(ln)


def test_serve_invalid_config_names_field(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"initial_level": 42}))
    proc = run_cli("serve", "--config", str(config))
    assert proc.returncode == 1
    assert "initial_level" in proc.stderr
