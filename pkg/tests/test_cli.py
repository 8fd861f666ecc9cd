import json
import subprocess
import sys

import pytest

from fairassign.cli import main
from fairassign.fixtures import NAMES, fixture_text
from fairassign.model import assignment_from_lottery, assignment_to_json, load_instance, lottery_from_json


@pytest.fixture
def ws(tmp_path):
    for name in NAMES:
        (tmp_path / f"{name}.json").write_text(fixture_text(name))
    return tmp_path


def run(*args):
    return main([str(a) for a in args])


def test_solve_ce_thm1(ws, capsys):
    assert run("solve", "--alg", "ce", "--instance", ws / "thm1.json") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["matrix"]["1"] == {"a": "0/1", "b": "0/1", "c": "1/2", "d": "1/2"}
    assert doc["matrix"]["3"]["a"] == "1/1" and doc["matrix"]["4"]["b"] == "1/1"


def test_solve_rsd_two_agent(ws):
    assert run("solve", "--alg", "rsd", "--instance", ws / "two_agent.json", "--out", ws / "l.json") == 0
    assert json.loads((ws / "l.json").read_text()) == [{"assignment": {"1": "a", "2": "b"}, "weight": "1/1"}]
    uniform = json.loads(fixture_text("two_agent"))
    uniform["priority"] = [{"order": ["1", "2"], "weight": "1/2"}, {"order": ["2", "1"], "weight": "1/2"}]
    (ws / "u.json").write_text(json.dumps(uniform))
    assert run("solve", "--alg", "rsd", "--instance", ws / "u.json", "--out", ws / "l2.json") == 0
    assert len(json.loads((ws / "l2.json").read_text())) == 2


def test_missing_file(ws, capsys):
    assert run("solve", "--alg", "ps", "--instance", ws / "nope.json") == 2
    assert "nope.json" in capsys.readouterr().err


def test_invalid_instance_names_invariant(ws, capsys):
    bad = json.loads(fixture_text("thm1"))
    bad["priority"][0]["weight"] = "1/3"
    (ws / "bad.json").write_text(json.dumps(bad))
    assert run("solve", "--alg", "ce", "--instance", ws / "bad.json") == 2
    assert "sum to" in capsys.readouterr().err
    (ws / "garbage.json").write_text("{not json")
    assert run("solve", "--alg", "ce", "--instance", ws / "garbage.json") == 2


def test_audit_thm1(ws, capsys):
    run("solve", "--alg", "ce", "--instance", ws / "thm1.json", "--out", ws / "ce.json")
    assert run("audit", "--props", "sef,oe,1lef", "--instance", ws / "thm1.json", "--assignment", ws / "ce.json") == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert [x["property"] for x in lines] == ["sef", "oe", "1lef"]
    assert all(x["verdict"] == "pass" for x in lines)
    assert run("audit", "--props", "prop", "--instance", ws / "thm1.json", "--assignment", ws / "ce.json") == 1
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "fail" and rep["witnesses"][0]["agent"] == "1"


def test_audit_half_split_fails_1lef(ws, capsys):
    (ws / "split.json").write_text(json.dumps({"matrix": {"1": {"a": "1/2", "b": "1/2"}, "2": {"a": "1/2", "b": "1/2"}}}))
    assert run("audit", "--props", "1lef", "--instance", ws / "two_agent.json", "--assignment", ws / "split.json") == 1
    assert json.loads(capsys.readouterr().out)["verdict"] == "fail"


def test_audit_lottery_modes(ws, capsys):
    run("solve", "--alg", "rsd", "--instance", ws / "thm1.json", "--out", ws / "rsd.json")
    # a lottery is not an assignment document
    assert run("decompose", "--assignment", ws / "rsd.json") == 2
    capsys.readouterr()
    inst, _ = load_instance(fixture_text("thm1"))
    lot = lottery_from_json(json.loads((ws / "rsd.json").read_text()), inst)
    (ws / "p.json").write_text(json.dumps(assignment_to_json(assignment_from_lottery(lot), inst)))
    args = ["--instance", ws / "thm1.json", "--assignment", ws / "p.json"]
    assert run("audit", "--props", "lef,1lef,prop", *args, "--lottery", ws / "rsd.json") == 0
    props = [json.loads(x)["property"] for x in capsys.readouterr().out.splitlines()]
    assert props == ["lef", "1lef-lottery", "prop"]
    assert run("audit", "--props", "lef", *args) == 2
    run("solve", "--alg", "ce", "--instance", ws / "thm1.json", "--out", ws / "ce.json")
    assert run("audit", "--props", "sef", "--instance", ws / "thm1.json", "--assignment", ws / "ce.json",
               "--lottery", ws / "rsd.json") == 2
    assert run("audit", "--props", "bogus", *args) == 2


def test_lefcheck(ws, capsys):
    run("solve", "--alg", "ce", "--instance", ws / "thm1.json", "--out", ws / "ce.json")
    assert run("lefcheck", "--instance", ws / "thm1.json", "--assignment", ws / "ce.json") == 1
    assert capsys.readouterr().out.startswith("infeasible\n")
    (ws / "id.json").write_text(json.dumps({"matrix": {"1": {"a": "1", "b": "0"}, "2": {"a": "0", "b": "1"}}}))
    assert run("lefcheck", "--instance", ws / "two_agent.json", "--assignment", ws / "id.json") == 0
    out = capsys.readouterr().out
    assert out.startswith("feasible\n")
    assert json.loads(out.split("\n", 1)[1]) == [{"assignment": {"1": "a", "2": "b"}, "weight": "1/1"}]


def test_lefcheck_size_guard(ws, capsys):
    agents = [str(k) for k in range(1, 10)]
    items = [f"x{k}" for k in range(1, 10)]
    inst = {
        "agents": agents,
        "items": items,
        "preferences": {a: items for a in agents},
        "priority": [{"order": agents, "weight": "1"}],
    }
    (ws / "nine.json").write_text(json.dumps(inst))
    eye = {"matrix": {a: {x: "1" if i == j else "0" for j, x in enumerate(items)} for i, a in enumerate(agents)}}
    (ws / "eye.json").write_text(json.dumps(eye))
    assert run("lefcheck", "--instance", ws / "nine.json", "--assignment", ws / "eye.json") == 2
    assert "limited to 8" in capsys.readouterr().err


def test_decompose(ws, capsys):
    (ws / "perm.json").write_text(json.dumps({"matrix": {"1": {"a": "0", "b": "1"}, "2": {"a": "1", "b": "0"}}}))
    assert run("decompose", "--assignment", ws / "perm.json") == 0
    assert json.loads(capsys.readouterr().out) == [{"assignment": {"1": "b", "2": "a"}, "weight": "1/1"}]
    (ws / "bad.json").write_text(json.dumps({"matrix": {"1": {"a": "1/2", "b": "0"}}}))
    assert run("decompose", "--assignment", ws / "bad.json") == 2


def test_experiment_outputs(ws):
    args = ["experiment", "--schools", "1,2", "--beta", "0.5", "--students", "10", "--disadvantaged", "3",
            "--q", "10", "--trials", "2", "--seed", "3"]
    assert run(*args, "--out", ws / "a.csv", "--svg", ws / "a.svg") == 0
    assert run(*args, "--out", ws / "b.csv", "--svg", ws / "b.svg") == 0
    assert (ws / "a.csv").read_bytes() == (ws / "b.csv").read_bytes()
    assert (ws / "a.svg").read_bytes() == (ws / "b.svg").read_bytes()
    rows = (ws / "a.csv").read_text().splitlines()
    assert len(rows) == 13
    assert all(r.split(",")[4] == "0.0000" for r in rows[1:] if r.split(",")[3] in ("CE", "UTE"))


@pytest.mark.parametrize(
    "flags", [["--schools", "x"], ["--students", "5", "--disadvantaged", "9"], ["--beta", "-1"], ["--bias-model", "z"]]
)
def test_experiment_bad_flags(flags, capsys):
    with pytest.raises(SystemExit) as exc:
        code = run("experiment", *flags, "--trials", "1", "--q", "1")
        raise SystemExit(code)
    assert exc.value.code == 2


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        main(["experiment", "--help"])
    text = capsys.readouterr().out
    for flag in ("--schools", "--beta", "--bias-model", "--students", "--disadvantaged", "--q", "--trials",
                 "--seed", "--out", "--svg"):
        assert flag in text


def test_fixture_command_and_module_entry(ws):
    out = subprocess.run([sys.executable, "-m", "fairassign", "fixture", "thm2"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["agents"] == ["1", "2", "3", "4", "5"]
