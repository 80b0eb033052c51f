import json

import pytest

from conftest import PROGRAMS
from syncnets.cli import main

CORPUS = sorted(p.stem for p in PROGRAMS.glob("*.qlam"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def last_json(out: str):
    return json.loads(out.strip().splitlines()[-1])


def test_check_correct_net(capsys):
    code, out, _ = run(capsys, "check", PROGRAMS / "bell.net.json")
    assert code == 0 and last_json(out)["correct"] is True


def test_check_incorrect_net(capsys):
    code, out, err = run(capsys, "check", PROGRAMS / "nets" / "deadlock.net.json")
    assert code == 1 and last_json(out)["correct"] is False and "cycle" in err


def test_eval_dist_coin(capsys):
    code, out, _ = run(capsys, "eval", "--dist", PROGRAMS / "coin.qlam")
    assert code == 0
    assert last_json(out) == pytest.approx({"tt": 0.5, "ff": 0.5}, abs=1e-9)


def test_dot_bell(capsys):
    code, out, _ = run(capsys, "dot", PROGRAMS / "bell.net.json")
    assert code == 0 and out.startswith("digraph")
    assert "shape=square" in out and "dir=none" in out


@pytest.mark.parametrize("name", CORPUS)
def test_pipeline_identity(name, capsys, tmp_path):
    net = tmp_path / f"{name}.net.json"
    assert run(capsys, "compile", PROGRAMS / f"{name}.qlam", "-o", net)[0] == 0
    code, out, _ = run(capsys, "run-qsiam", net, "--exact")
    assert code == 0
    machine = last_json(out)["values"]
    code, out, _ = run(capsys, "eval", "--dist", PROGRAMS / f"{name}.qlam")
    evaluated = last_json(out)
    assert set(machine) == set(evaluated)
    for k in evaluated:
        assert machine[k] == pytest.approx(evaluated[k], abs=1e-9)


def test_typecheck_and_parse(capsys):
    code, out, _ = run(capsys, "typecheck", PROGRAMS / "bell.qlam")
    assert code == 0 and last_json(out)["type"]
    code, out, _ = run(capsys, "parse", PROGRAMS / "coin.qlam")
    assert code == 0 and "meas" in last_json(out)["term"]


def test_type_error_is_a_domain_failure(capsys, tmp_path):
    bad = tmp_path / "bad.qlam"
    bad.write_text("meas tt")
    code, _, err = run(capsys, "typecheck", bad)
    assert code == 1 and err


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["eval", "--bogus", "x.qlam"],
    ["check", "does/not/exist.json"],
    ["normalize", "--strategy", "sometimes", "x.json"],
    ["run-qsiam", "--shots", "0", "x.json"],
])
def test_usage_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_deadlocked_run_is_a_domain_failure(capsys):
    code, out, _ = run(capsys, "run-siam", PROGRAMS / "nets" / "deadlock.net.json")
    assert code == 1 and last_json(out)["outcome"] == "deadlock"


def test_normalize_plain_net_with_trace(capsys):
    code, out, _ = run(capsys, "normalize", "--trace", PROGRAMS / "nets" / "not_true.net.json")
    assert code == 0
    rows = [json.loads(l) for l in out.strip().splitlines()]
    assert {"step", "redexKind", "site", "measureMajor", "measureMinor", "prob"} <= set(rows[0])
    assert "normalForm" in rows[-1]


def test_normalize_quantum_net(capsys):
    code, out, _ = run(capsys, "normalize", PROGRAMS / "coin.net.json")
    assert code == 0
    assert last_json(out)["values"] == pytest.approx({"tt": 0.5, "ff": 0.5}, abs=1e-9)


@pytest.mark.parametrize("argv", [
    ["run-qsiam", PROGRAMS / "coin.net.json", "--shots", "20", "--seed", "7"],
    ["eval", PROGRAMS / "coin_pair.qlam", "--seed", "5"],
    ["run-siam", PROGRAMS / "nets" / "not_true.net.json", "--schedule", "seed:3"],
    ["normalize", PROGRAMS / "nets" / "not_true.net.json", "--strategy", "seed:9"],
])
def test_seeded_commands_are_deterministic(argv, capsys):
    first = run(capsys, *argv)
    assert first[0] == 0
    assert run(capsys, *argv) == first


def test_exhaustive_schedule(capsys):
    code, out, _ = run(capsys, "run-siam", PROGRAMS / "nets" / "false.net.json", "--schedule", "exhaustive")
    body = last_json(out)
    assert code == 0 and body["finalStates"] == 1


def test_gates_file(capsys, tmp_path):
    gates = tmp_path / "gates.json"
    gates.write_text(json.dumps({"name": "NOT", "arity": 1, "matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}))
    prog = tmp_path / "p.qlam"
    prog.write_text("meas (NOT new)")
    code, out, err = run(capsys, "--gates", gates, "eval", "--dist", prog)
    assert code == 0, err
    assert last_json(out) == pytest.approx({"ff": 1.0})
