import time

import pytest

from sfbmc.derivation import Derivation
from sfbmc.expr import TRUE, Binary, Const, In, Sym, Unary, conj
from sfbmc.parser import parse_model
from sfbmc.solver import SolverSession
from sfbmc.sts import (STS, ProgramTransition, build_sts, check_exhaustive_determinism,
                       check_partition, check_transition_soundness, phi_or)
from sfbmc.syntax import VarDecl

STOPWATCH_POINTS = {
    frozenset(),
    frozenset({("Stop",), ("Stop", "Reset")}),
    frozenset({("Stop",), ("Stop", "Lap_stop")}),
    frozenset({("Run",), ("Run", "Running")}),
    frozenset({("Run",), ("Run", "Lap")}),
}
RUNNING = frozenset({("Run",), ("Run", "Running")})


def test_toggle_points_and_transitions(toggle_sts):
    assert set(toggle_sts.control_points) == {frozenset(), frozenset({("A",)}), frozenset({("B",)})}
    assert len(toggle_sts.transitions) == 3


def test_stopwatch_points(stopwatch_sts):
    assert set(stopwatch_sts.control_points) == STOPWATCH_POINTS
    assert len(stopwatch_sts.control_points) == 5


def test_stopwatch_transition_count(stopwatch):
    start = time.perf_counter()
    sts = build_sts(stopwatch)
    assert len(sts.transitions) == 22
    assert time.perf_counter() - start < 5


def test_phi_or_empty(stopwatch_sts):
    cv = stopwatch_sts.control_vars
    assert phi_or(frozenset(), cv) == conj(Unary("!", In(p)) for p in cv)


def test_phi_or_running(stopwatch_sts):
    cv = stopwatch_sts.control_vars
    expected = conj([Unary("!", In(("Stop",))), Unary("!", In(("Stop", "Reset"))),
                     Unary("!", In(("Stop", "Lap_stop"))), In(("Run",)), In(("Run", "Running")),
                     Unary("!", In(("Run", "Lap")))])
    assert phi_or(RUNNING, cv) == expected


def test_phi_or_toggle(toggle_sts):
    assert phi_or(frozenset({("A",)}), toggle_sts.control_vars) == \
        Binary("&&", In(("A",)), Unary("!", In(("B",))))


def test_toggle_transition_formula(toggle_sts):
    (f,) = [f for f in toggle_sts.formulas() if f.event == "FLIP" and f.src_phi ==
            Binary("&&", In(("A",)), Unary("!", In(("B",))))]
    assert f.guard == TRUE
    assert f.dst_phi == Binary("&&", Unary("!", In(("A",))), In(("B",)))
    assert dict(f.updates) == {"n": Binary("+", Sym("n"), Const(1))}


def test_tic_increment_branch(stopwatch_sts):
    ts = [t for t in stopwatch_sts.transitions
          if t.src == RUNNING and t.event == "TIC" and Binary("<", Sym("cent"), Const(100)) in t.conjuncts]
    assert len(ts) == 1
    assert ts[0].update["cent"] == Binary("+", Sym("cent"), Const(1))
    assert ts[0].dst == RUNNING


def test_no_fire_self_loop(stopwatch_sts):
    lap_stop = frozenset({("Stop",), ("Stop", "Lap_stop")})
    (t,) = [t for t in stopwatch_sts.transitions
            if t.src == lap_stop and t.event == "LAP" and t.dst == lap_stop]
    assert all(isinstance(c, Unary) and c.op == "!" for c in t.conjuncts)
    assert all(e == Sym(v) for v, e in t.update.items())


def test_init_transition_has_no_event(stopwatch_sts):
    inits = [t for t in stopwatch_sts.transitions if not t.src]
    assert len(inits) == 1 and inits[0].event is None
    assert inits[0].dst == {("Stop",), ("Stop", "Reset")}


def test_program_without_transitions():
    sts = build_sts(parse_model("program P; var x: int = 0; or { state A { } transitions { -> A; } }"))
    assert len(sts.transitions) == 1
    assert sts.transitions[0].src == frozenset()


def test_sampled_determinism_and_soundness(stopwatch_sts, toggle_sts):
    for sts in (stopwatch_sts, toggle_sts):
        assert check_exhaustive_determinism(sts) == []
        assert check_transition_soundness(sts) == []


def test_to_json(stopwatch_sts):
    data = stopwatch_sts.to_json()
    assert len(data["transitions"]) == 22
    assert ["Run", "Run.Running"] in data["controlPoints"]
    assert data["controlVars"][0] == "Stop"


@pytest.mark.solver
def test_partition_bundled(stopwatch_sts, toggle_sts):
    with SolverSession() as session:
        for sts in (stopwatch_sts, toggle_sts):
            report = check_partition(sts, session)
            assert report, report.problems


def _overlapping() -> STS:
    prog = parse_model("program P; events E; var x: int = 0; or { state A { } transitions { -> A; } }")
    a = frozenset({("A",)})
    d = Derivation("T-FIRE", "hand", "step")
    mk = lambda i, g: ProgramTransition(i, a, "E", (g,), {"x": Sym("x")}, (), a, d)
    return STS(prog, [("A",)], [VarDecl("x", "int", 0)], ["E"], [a],
               [mk(0, Binary(">", Sym("x"), Const(0))), mk(1, Binary(">", Sym("x"), Const(1)))])


@pytest.mark.solver
def test_partition_detects_overlap():
    with SolverSession() as session:
        report = check_partition(_overlapping(), session)
    assert not report
    assert any("overlap" in p for p in report.problems)
    assert any("cover" in p for p in report.problems)
