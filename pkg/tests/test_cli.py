from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from bb84opt.cli import RunConfig, UsageError, main
from bb84opt.linalg import complex_to_pairs, haar_random_unitary
from bb84opt.states import random_setup


def run(tmp_path, *args):
    out = tmp_path / "out.txt"
    code = main([*args, "--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def test_sweep_rows(tmp_path):
    code, text = run(tmp_path, "sweep", "--start", "0", "--stop", "0.25", "--step", "0.005")
    assert code == 0
    lines = text.strip().split("\n")
    assert len(lines) == 52
    rows = {round(float(r.split(",")[0]), 6): r.split(",") for r in lines[1:]}
    assert float(rows[0.145][4]) > 0 and float(rows[0.15][4]) == 0
    assert rows[0.0][1:5] == ["0", "1", "0", "1"]


def test_sweep_brackets_threshold(tmp_path):
    code, text = run(tmp_path, "sweep", "--start", "0.1464", "--stop", "0.1465", "--step", "0.0001")
    rows = [r.split(",") for r in text.strip().split("\n")[1:]]
    assert code == 0 and len(rows) == 2
    assert float(rows[0][4]) > 0 and float(rows[1][4]) == 0


def test_sweep_json(tmp_path):
    code, text = run(tmp_path, "sweep", "--format", "json", "--step", "0.05")
    data = json.loads(text)
    assert code == 0 and len(data) == 6 and data[0]["mi_ab"] == 1


def test_sweep_unwritable_path(capsys):
    assert main(["sweep", "--out", "/nonexistent-dir/x.csv"]) == 2
    assert "cannot write" in capsys.readouterr().err


def test_verify_fuchs(tmp_path):
    code, text = run(tmp_path, "verify", "--d-xy", "0.1", "--d-uv", "0.1", "--measurement", "fuchs")
    rep = json.loads(text)
    assert code == 0 and rep["passed"] and rep["max_residual"] < 1e-9


def test_verify_perturbed(tmp_path):
    code, text = run(tmp_path, "verify", "--perturb", "0.05")
    rep = json.loads(text)
    assert code == 1 and not rep["passed"]
    assert rep["per_condition"]["corollary"] > 1e-9


def test_verify_exit_is_and_of_conditions(tmp_path):
    for args in ([], ["--perturb", "0.2"], ["--measurement", "random", "--seed", "3"]):
        code, text = run(tmp_path, "verify", "--d-xy", "0.2", "--d-uv", "0.35", *args)
        rep = json.loads(text)
        assert (code == 0) == all(v <= rep["tolerance"] for v in rep["per_condition"].values())


def test_verify_asymmetric(tmp_path):
    code, _ = run(tmp_path, "verify", "--d-xy", "0.3", "--d-uv", "0.05")
    assert code == 0


def test_synth_delta_hadamard_sparsity(tmp_path):
    code, text = run(tmp_path, "synth", "--d-xy", "0.1", "--d-uv", "0.1")
    u = np.array(json.loads(text)["u"])
    u = u[..., 0] + 1j * u[..., 1]
    assert code == 0
    assert np.count_nonzero(u) == 8 and set(np.unique(u)) <= {0, 1}


def test_synth_round_trip(tmp_path):
    attack = tmp_path / "attack.json"
    assert main(["synth", "--initial-state", "bell", "--measurement", "fuchs", "--out", str(attack)]) == 0
    code, text = run(tmp_path, "verify", "--attack", str(attack))
    rep = json.loads(text)
    assert code == 0 and rep["anchor_defect"] < 1e-9 and rep["xy"]["passed"] and rep["uv"]["passed"]


def test_verify_tampered_attack(tmp_path):
    attack = tmp_path / "attack.json"
    main(["synth", "--out", str(attack)])
    data = json.loads(attack.read_text())
    data["u"] = complex_to_pairs(haar_random_unitary(8, 1))
    attack.write_text(json.dumps(data))
    code, _ = run(tmp_path, "verify", "--attack", str(attack))
    assert code == 1


def test_synth_csv(tmp_path):
    code, text = run(tmp_path, "synth", "--format", "csv", "--initial-state", "zero")
    lines = text.strip().split("\n")
    assert code == 0 and len(lines) == 9 and all(len(r.split(",")) == 16 for r in lines)


def test_synth_from_files(tmp_path):
    state = tmp_path / "state.json"
    state.write_text(json.dumps(complex_to_pairs(haar_random_unitary(4, 3)[:, 0])))
    meas = tmp_path / "m.json"
    meas.write_text(json.dumps(random_setup(2).to_dict()))
    code, text = run(tmp_path, "synth", "--initial-state", "file", "--state-file", str(state),
                     "--measurement", "file", "--measurement-file", str(meas))
    assert code == 0 and "initial_state" in json.loads(text)


def test_synth_bad_state_file(tmp_path):
    state = tmp_path / "state.json"
    state.write_text(json.dumps([[1, 0], [1, 0], [0, 0], [0, 0]]))
    assert main(["synth", "--initial-state", "file", "--state-file", str(state)]) == 2
    assert main(["synth", "--initial-state", "file"]) == 2


def test_simulate_deterministic(tmp_path):
    args = ["simulate", "--d-xy", "0.1", "--d-uv", "0.1", "--n", "1000000", "--seed", "7"]
    code, first = run(tmp_path, *args)
    _, second = run(tmp_path, *args, "--workers", "3")
    stats = json.loads(first)
    assert code == 0 and first == second
    assert abs(stats["qber"]["xy"] - 0.1) < 0.003


def test_simulate_cells(tmp_path):
    cells = tmp_path / "cells.csv"
    code, _ = run(tmp_path, "simulate", "--n", "20000", "--cells", str(cells))
    assert code == 0 and cells.read_text().startswith("basis,a,b,lambda,exact,empirical,n\n")


def test_chsh(tmp_path):
    code, text = run(tmp_path, "chsh", "--d-xy", "0", "--n", "1000000")
    data = json.loads(text)
    assert code == 0 and abs(data["S"] - 2.8284) < 5 * data["stderr"]


def test_oracle(tmp_path):
    code, text = run(tmp_path, "oracle", "--d-xy", "0.1", "--n-povms", "10000")
    data = json.loads(text)
    assert code == 0 and data["best_ig"] <= data["eigen_ig"] + 1e-9
    assert abs(data["eigen_ig"] - 0.6) < 1e-10


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d_xy": 0.3, "d_uv": 0.05, "measurement": "fuchs"}))
    code, text = run(tmp_path, "verify", "--config", str(cfg), "--d-uv", "0.2")
    rep = json.loads(text)
    assert code == 0
    assert rep["rates"] == {"d_xy": 0.3, "d_uv": 0.2} and rep["measurement"] == "fuchs"


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    assert main(["sweep", "--config", str(cfg)]) == 2


@pytest.mark.parametrize("args", [["sweep", "--step", "0"], ["sweep", "--start", "0.3", "--stop", "0.1"],
                                  ["verify", "--d-xy", "0.7"], ["frobnicate"], ["verify", "--measurement", "odd"]])
def test_usage_errors(args):
    assert main(args) == 2


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(step=-1).validate()
    assert RunConfig(d_xy=0.2).rates.d_uv == 0.2


def test_outputs_are_byte_identical(tmp_path):
    for cmd in (["sweep"], ["synth", "--initial-state", "bell"], ["oracle", "--n-povms", "500"]):
        a, b = tmp_path / "a", tmp_path / "b"
        main([*cmd, "--out", str(a)])
        main([*cmd, "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bb84opt.cli", "sweep", "--step", "0.125"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.count("\n") == 4
