import json
from importlib import resources

import pytest

from rsgame.cli import export_dot, main, parse_initial
from rsgame.dynamics import run_dynamics, enumerate_pne


def data(name):
    return str(resources.files("rsgame") / "data" / f"{name}.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_fip_nonfip(capsys):
    code, rep = run(capsys, "fip", "--game", data("nonfip"))
    assert code == 0 and rep["results"]["fip"] is False
    cycle = rep["results"]["witness_cycle"]
    assert len(cycle) >= 3 and cycle[0] == cycle[-1]


def test_bce_report(capsys):
    code, rep = run(capsys, "bce", "--game", data("signaling"))
    r = rep["results"]
    assert code == 0
    assert r["pbne_cost"] == 32 and r["reported_policy_cost"] == 27.88
    assert r["lp_optimum"] <= 27.9 and r["discrepancy"] is True
    assert r["poa"]["pbne"] == 1.2308


def test_pne_state_zero(capsys):
    code, rep = run(capsys, "pne", "--game", data("signaling"), "--state", "0")
    assert [p["labels"] for p in rep["results"]["pne"]] == [["D", "D"]]


def test_pbne(capsys):
    code, rep = run(capsys, "pbne", "--scenario", "signaling")
    assert rep["results"]["pbne"][0]["expected_social_cost"] == 32


def test_reports_are_deterministic(capsys):
    _, a = run(capsys, "dynamics", "--scenario", "nonfip", "--initial", "2,0,3", "--order", "random:5")
    _, b = run(capsys, "dynamics", "--scenario", "nonfip", "--initial", "2,0,3", "--order", "random:5")
    assert a["results"] == b["results"] and a["fingerprint"] == b["fingerprint"]


def test_exit_codes(capsys, tmp_path):
    assert main(["poa", "--scenario", "nonfip"]) == 4
    assert main(["pne", "--scenario", "fip", "--budget", "10"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["pne", "--game", str(bad)]) == 3
    assert main(["bce", "--scenario", "fip"]) == 4
    assert main(["pne", "--scenario", "signaling"]) == 4


def test_out_and_dot(capsys, tmp_path):
    out, dot = tmp_path / "r.json", tmp_path / "g.dot"
    assert main(["fip", "--scenario", "fip", "--out", str(out), "--dot", str(dot)]) == 0
    assert json.loads(out.read_text())["results"]["fip"] is True
    assert dot.read_text().startswith("digraph")


def test_scenario_command(capsys):
    code, rep = run(capsys, "scenario", "--scenario", "fip")
    assert rep["results"]["game"]["vehicles"]["capacity"] == 4


def test_hypotheses_and_potential(capsys):
    _, rep = run(capsys, "hypotheses", "--scenario", "two_vehicle")
    assert rep["results"]["verdicts"]["H2"] is False
    _, rep = run(capsys, "potential-check", "--scenario", "nonfip")
    assert rep["results"]["ordinal_potential"] is False


def test_parse_initial(fip):
    assert parse_initial(None, fip) == (0, 0, 0)
    assert parse_initial("1,2,3", fip) == (1, 2, 3)
    assert parse_initial("19", fip) == (0, 1, 1)
    with pytest.raises(ValueError):
        parse_initial("1,2", fip)


def test_trace_dot_is_a_chain(fip, idx, tmp_path):
    walk = idx["(1,1,3,4,1)"]
    trace = run_dynamics(fip, (walk, walk, walk))
    path = tmp_path / "t.dot"
    export_dot(trace, path, fip)
    arrows = [l for l in path.read_text().splitlines() if "->" in l]
    assert len(arrows) == len(trace)
    heads = [l.split("->")[0].strip() for l in arrows]
    assert len(set(heads)) == len(heads)


def test_trace_dot_from_equilibrium(fip, tmp_path):
    trace = run_dynamics(fip, enumerate_pne(fip)[0])
    path = tmp_path / "t.dot"
    export_dot(trace, path, fip)
    assert "->" not in path.read_text()
