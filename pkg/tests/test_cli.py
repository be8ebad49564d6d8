import json
import subprocess
import sys

import pytest

from sfbmc.cli import bundled_path, main, read_events


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.solver
def test_check_violated(capsys):
    code, out, _ = run(capsys, "check", "stopwatch.sfi", "--prop", "cent >= 0 && cent <= 5",
                       "--kmax", "200")
    assert code == 1
    assert "Violated at depth 8" in out
    assert "<-- violated" in out


@pytest.mark.solver
def test_check_safe(capsys):
    code, out, _ = run(capsys, "check", "toggle.sfi", "--prop", "!(in(A) && in(B))", "--kmax", "10")
    assert code == 0
    assert "BoundedSafe up to depth 10" in out


@pytest.mark.solver
def test_check_json_with_prop_file(capsys):
    code, out, _ = run(capsys, "check", "stopwatch.sfi", "--prop-file", "cent_le_10.prop",
                       "--json", "--no-incremental")
    data = json.loads(out)
    assert code == 1
    assert (data["verdict"], data["depth"], data["mode"]) == ("Violated", 13, "non-incremental")


@pytest.mark.solver
def test_check_emits_artifacts(capsys, tmp_path):
    code, _, _ = run(capsys, "check", "toggle.sfi", "--prop", "n >= 0", "--kmax", "3",
                     "--emit-smt", str(tmp_path / "smt"), "--emit-sts", str(tmp_path / "sts.json"),
                     "--emit-derivations", str(tmp_path / "der"))
    assert code == 0
    assert len(list((tmp_path / "smt").iterdir())) == 4
    assert len(json.loads((tmp_path / "sts.json").read_text())["transitions"]) == 3
    assert sorted(p.name for p in (tmp_path / "der").iterdir()) == [
        "T00.json", "T00.txt", "T01.json", "T01.txt", "T02.json", "T02.txt"]


def test_check_unknown_on_missing_solver(capsys):
    code, out, _ = run(capsys, "check", "toggle.sfi", "--prop", "n >= 0", "--solver", "/no/such")
    assert code == 3
    assert "Unknown" in out


def test_derive(capsys):
    code, out, _ = run(capsys, "derive", "stopwatch.sfi")
    assert code == 0
    assert "5 control points, 22 transitions" in out


def test_derive_json(capsys):
    code, out, _ = run(capsys, "derive", "stopwatch.sfi", "--json")
    data = json.loads(out)
    assert sorted(map(tuple, data["controlPoints"])) == sorted([
        (), ("Stop", "Stop.Reset"), ("Stop", "Stop.Lap_stop"), ("Run", "Run.Running"), ("Run", "Run.Lap")])


def test_simulate(capsys, tmp_path):
    events = tmp_path / "script.txt"
    events.write_text("START\nTIC, TIC  # two ticks\n")
    code, out, _ = run(capsys, "simulate", "stopwatch.sfi", "--events", str(events))
    lines = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert [line["event"] for line in lines] == [None, "START", "TIC", "TIC"]
    assert lines[-1]["vars"]["cent"] == 2


def test_simulate_inline_events(capsys):
    code, out, _ = run(capsys, "simulate", "toggle.sfi", "--events", "FLIP,FLIP")
    assert code == 0 and len(out.splitlines()) == 3


@pytest.mark.parametrize("argv, message", [
    (["check", "missing.sfi", "--prop", "x"], "model not found"),
    (["check", "stopwatch.sfi"], "exactly one of --prop or --prop-file"),
    (["check", "stopwatch.sfi", "--prop", "speed > 0"], "undeclared variable speed"),
    (["check", "stopwatch.sfi", "--prop", "cent >= 0", "--kmax", "-1"], "non-negative"),
    (["simulate", "toggle.sfi", "--events", "FLIP,JUMP"], "unknown event JUMP"),
])
def test_usage_errors(capsys, argv, message):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert message in err


def test_invalid_model(capsys, tmp_path):
    bad = tmp_path / "bad.sfi"
    bad.write_text("program P; events E; or { state A { outer { on E -> J1; } }"
                   " junctions { J1: { -> J2; } J2: { -> J1; } } transitions { -> A; } }")
    code, _, err = run(capsys, "derive", str(bad))
    assert code == 2
    assert "cyclic junction network" in err


def test_argparse_errors_exit_2(capsys):
    assert main(["bogus"]) == 2
    assert main(["check", "stopwatch.sfi", "--kmax", "many"]) == 2


def test_helpers(tmp_path):
    assert bundled_path("stopwatch.sfi").endswith("stopwatch.sfi")
    assert bundled_path("cent_le_99.prop").endswith("cent_le_99.prop")
    assert bundled_path("nothing.sfi") is None
    assert read_events("A, B C") == ["A", "B", "C"]


@pytest.mark.solver
def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sfbmc", "check", "toggle.sfi", "--prop",
                           "!(in(A) && in(B))", "--kmax", "4", "--json"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "BoundedSafe"
