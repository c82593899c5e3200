import csv
import json

import pytest

from zkseq import cli
from zkseq.verify import is_sequencing, is_t_weak


def run(capsys, *argv):
    rc = cli.main(list(argv))
    cap = capsys.readouterr()
    return rc, cap.out, cap.err


def test_usage_errors(capsys):
    assert cli.main([]) == 1
    capsys.readouterr()
    rc, _, _ = run(capsys, "sequence", "--modulus", "10", "--elements", "1,2,x")
    assert rc == 1
    rc, _, err = run(capsys, "sequence", "--modulus", "10", "--elements", "1",
                     "--mode", "tweak")
    assert rc == 1   # tweak requires --t
    rc, _, _ = run(capsys, "sequence", "--modulus", "10", "--elements", "10")
    assert rc == 1   # zero residue rejected by the service


def test_sequence_stdout_json(capsys):
    rc, out, _ = run(capsys, "sequence", "--modulus", "13",
                     "--elements", "1,2,3,4,5", "--mode", "classical",
                     "--seed", "0")
    assert rc == 0
    payload = json.loads(out)
    assert payload["k"] == 13
    assert is_sequencing(payload["ordering"], 13)
    assert payload["mode"] == "classical"


def test_sequence_verify_round_trip(tmp_path, capsys):
    path = tmp_path / "ordering.json"
    rc, out, _ = run(capsys, "sequence", "--modulus", "101",
                     "--elements", "1,3,9,27,81,2,100", "--mode", "tweak",
                     "--t", "3", "--seed", "0", "--out", str(path))
    assert rc == 0
    saved = json.loads(path.read_text())
    assert is_t_weak(saved["ordering"], 101, 3)
    rc, _, _ = run(capsys, "verify", "--ordering", str(path))
    assert rc == 0
    rc, _, _ = run(capsys, "verify", "--ordering", str(path), "--goal",
                   "tweak", "--t", "3")
    assert rc == 0


def test_sequence_infeasible_exit_code(capsys):
    rc, _, err = run(capsys, "sequence", "--modulus", "10",
                     "--elements", "1,2,3,4", "--mode", "tweak", "--t", "2")
    assert rc == 2
    assert "infeasible" in err or "total" in err


def test_verify_failure_witness(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"k": 5, "ordering": [2, 3, 1]}))
    rc, _, err = run(capsys, "verify", "--ordering", str(path))
    assert rc == 3
    assert "zero-partial-sum" in err


def test_verify_goal_inferred_from_t(tmp_path, capsys):
    # 1,3 in Z_4 is a sequencing but not 1-weak (final sum 0 with n = 2)
    path = tmp_path / "o.json"
    path.write_text(json.dumps({"k": 4, "ordering": [1, 3]}))
    rc, _, _ = run(capsys, "verify", "--ordering", str(path))
    assert rc == 0
    rc, _, _ = run(capsys, "verify", "--ordering", str(path), "--t", "1")
    assert rc == 3


def test_set_file_input(tmp_path, capsys):
    setfile = tmp_path / "set.json"
    setfile.write_text(json.dumps({"k": 13, "elements": [1, 2, 3]}))
    rc, out, _ = run(capsys, "sequence", "--set", str(setfile), "--seed", "0")
    assert rc == 0
    assert sorted(json.loads(out)["ordering"]) == [1, 2, 3]
    rc, _, _ = run(capsys, "sequence", "--set", str(setfile), "--modulus", "14")
    assert rc == 1   # inconsistent with --modulus


def test_seed_env_fallback(tmp_path, capsys, monkeypatch):
    args = ("sequence", "--modulus", "13", "--elements", "2,5,6")
    monkeypatch.setenv("SEQ_SEED", "42")
    rc, out_env, _ = run(capsys, *args)
    assert rc == 0 and json.loads(out_env)["seed"] == 42
    rc, out_flag, _ = run(capsys, *args, "--seed", "7")
    assert json.loads(out_flag)["seed"] == 7   # flag wins
    monkeypatch.delenv("SEQ_SEED")
    rc, out_default, _ = run(capsys, *args)
    assert json.loads(out_default)["seed"] == 0


def test_deterministic_output(capsys):
    args = ("sequence", "--modulus", "17", "--elements", "1,2,3,5,8",
            "--seed", "3")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_dissociate_cli(capsys):
    rc, out, _ = run(capsys, "tools", "dissociate", "--modulus", "1000",
                     "--elements", "1,3,4")
    assert rc == 0
    assert json.loads(out)["dissociated"] is False


def test_rectify_cli(capsys):
    rc, out, _ = run(capsys, "tools", "rectify", "--modulus", "1009",
                     "--elements", "100,200", "--target", "3")
    assert rc == 0
    assert json.loads(out)["max_abs"] <= 2


def test_decompose_cli(capsys):
    rc, out, _ = run(capsys, "tools", "decompose", "--modulus", "1009",
                     "--elements", "1,2,3,1006,1007,1008", "--seed", "0")
    assert rc == 0
    body = json.loads(out)
    assert body["status"] == "ok"
    assert body["decomposition"]["blocks"] == []


def test_oracle_cli(capsys):
    rc, out, _ = run(capsys, "tools", "oracle", "--modulus", "5",
                     "--elements", "2,3", "--goal", "tweak", "--t", "1")
    assert rc == 0
    assert json.loads(out)["achievable"] is False


def test_census_csv(tmp_path, capsys):
    path = tmp_path / "census.csv"
    rc, _, _ = run(capsys, "tools", "oracle", "--modulus", "5",
                   "--max-size", "4", "--goal", "valid", "--out", str(path))
    assert rc == 0
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 15
    assert all(r["achievable"] in ("True", "1", "true") for r in rows)


def test_mc_lll_budget_cli(tmp_path, capsys):
    rc, out, _ = run(capsys, "tools", "mc", "lll-budget", "--p-hat", "0.01",
                     "--degree", "30")
    assert rc == 0
    assert "pass" in out
    path = tmp_path / "rep.csv"
    rc, _, _ = run(capsys, "tools", "mc", "lll-budget", "--p-hat", "0.01",
                   "--degree", "30", "--out", str(path))
    assert rc == 0
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["experiment"] == "lll-budget"
    assert rows[0]["verdict"] == "pass"
    assert abs(float(rows[0]["estimate"]) - 0.8154845485377136) < 1e-9


def test_mc_anticoncentration_cli(capsys):
    rc, out, _ = run(capsys, "tools", "mc", "anticoncentration",
                     "--modulus", str(3**9),
                     "--elements", ",".join(str(3**i) for i in range(8)),
                     "--I", "1", "--x", "4",
                     "--trials", "2000", "--seed", "0")
    assert rc == 0
    assert "anticoncentration" in out


def test_mc_union_bound_cli(capsys):
    rc, out, _ = run(capsys, "tools", "mc", "union-bound", "--a-size", "10",
                     "--R", "3", "--type-i", "1e-5", "--type-ii", "1e-4")
    assert rc == 0
    assert "0.011" in out
