import pytest

from sfbmc.concrete import eval_cond, exec_action, holds, run_trace, sos_init, sos_step
from sfbmc.parser import parse_expr, parse_model, parse_property
from sfbmc.semantics import END_TV, NO, SemanticsError
from sfbmc.syntax import Assign

RUN = frozenset({("Run",), ("Run", "Running")})


def env(**kw):
    base = dict(cent=0, sec=0, min=0, disp_cent=0, disp_sec=0, disp_min=0)
    base.update(kw)
    return base


def actions(text):
    return tuple(Assign(lhs.strip(), parse_expr(rhs))
                 for lhs, rhs in (a.split(":=") for a in text.split(";") if a.strip()))


@pytest.mark.parametrize("cond, values, expected", [
    ("true", {}, True),
    ("cent == 100", {"cent": 100}, True),
    ("cent < 100 && min >= 0", {"cent": 100, "min": 3}, False),
])
def test_eval_cond(cond, values, expected):
    assert eval_cond(parse_expr(cond), values) is expected


def test_exec_skip_is_identity():
    d = env(cent=4)
    assert exec_action((), d) == d


def test_exec_increment():
    assert exec_action(actions("cent := cent + 1"), env(cent=99)) == env(cent=100)


def test_exec_is_sequential():
    out = exec_action(actions("cent := 0; sec := sec + 1"), env(cent=100, sec=59))
    assert (out["cent"], out["sec"]) == (0, 60)


def test_exec_does_not_mutate():
    d = env(cent=1)
    exec_action(actions("cent := 5"), d)
    assert d["cent"] == 1


def test_initialization(stopwatch):
    active, d = sos_init(stopwatch)
    assert active == {("Stop",), ("Stop", "Reset")}
    assert d == env()


def test_start_from_uninitialized_enters_run(stopwatch):
    active, _ = sos_init(stopwatch)
    active, _ = sos_step(stopwatch, active, env(), "START")
    assert active == RUN


def test_tic_increments(stopwatch):
    active, d = sos_step(stopwatch, RUN, env(), "TIC")
    assert active == RUN
    assert d["cent"] == 1


def test_during_runs_after_parent_inner(stopwatch):
    # Run's inner TIC chain increments first, then Running's during copies
    _, d = sos_step(stopwatch, RUN, env(cent=7), "TIC")
    assert d["disp_cent"] == 8


def test_firing_state_skips_during(stopwatch):
    active, d = sos_step(stopwatch, RUN, env(cent=7), "LAP")
    assert active == {("Run",), ("Run", "Lap")}
    assert d["disp_cent"] == 0


def test_trace_lengths(stopwatch):
    trace = run_trace(stopwatch, [])
    assert len(trace) == 1
    assert trace[0].active == {("Stop",), ("Stop", "Reset")}
    assert run_trace(stopwatch, ["START", "TIC", "TIC"])[-1].env["cent"] == 2


def test_wrap_around(stopwatch):
    trace = run_trace(stopwatch, ["START"] + ["TIC"] * 101)
    cents = [t.env["cent"] for t in trace]
    assert 100 in cents
    assert cents[-1] == 0
    assert trace[-1].env["sec"] == 1


def test_lap_freezes_display(stopwatch):
    trace = run_trace(stopwatch, ["START", "TIC", "LAP", "TIC", "TIC"])
    last = trace[-1]
    assert last.active == {("Run",), ("Run", "Lap")}
    assert last.env["cent"] == 3
    assert last.env["disp_cent"] == 1


def test_stop_and_reset(stopwatch):
    trace = run_trace(stopwatch, ["START", "TIC", "START", "LAP"])
    assert trace[-2].active == {("Stop",), ("Stop", "Lap_stop")}
    assert trace[-1].active == {("Stop",), ("Stop", "Reset")}
    assert trace[-1].env["cent"] == 0


def test_lap_stop_guard_keeps_zero_time(stopwatch):
    trace = run_trace(stopwatch, ["START", "START", "LAP"])
    assert trace[-1].active == {("Stop",), ("Stop", "Lap_stop")}


def test_unknown_event(stopwatch):
    with pytest.raises(ValueError, match="unknown event"):
        run_trace(stopwatch, ["BOOM"])


def test_toggle_flips(toggle):
    trace = run_trace(toggle, ["FLIP", "FLIP", "FLIP"])
    assert [sorted(t.active) for t in trace] == [[("A",)], [("B",)], [("A",)], [("B",)]]
    assert trace[-1].env["n"] == 3


def test_holds(stopwatch):
    prop = parse_property("in(Run) && cent <= 5", stopwatch)
    assert holds(prop.expr, RUN, env(cent=5))
    assert not holds(prop.expr, RUN, env(cent=6))
    assert not holds(prop.expr, frozenset(), env())


JUNCTIONS = """
program J;
events E;
var x: int = 0;
or {
  state A { outer { on E -> J1 / { x := x + 100; }; on E -> A / { x := x + 10; }; } }
  state B { }
  state C { }
  junctions {
    J1: { [x == 1] -> B; [x == 2] -> end; }
  }
  transitions { -> A; }
}
"""


@pytest.mark.parametrize("x0, dest, x1", [
    (1, ("B",), 101),   # the chain completes: both segment actions run
    (2, ("A",), 2),     # reaches a terminal junction: nothing fires, no actions
    (3, ("A",), 13),    # the junction fails: backtrack to the next transition
])
def test_junction_outcomes(x0, dest, x1):
    prog = parse_model(JUNCTIONS)
    active, d = sos_step(prog, frozenset({("A",)}), {"x": x0}, "E")
    assert active == {dest}
    assert d["x"] == x1


def test_divergence_budget(stopwatch):
    with pytest.raises(SemanticsError):
        sos_step(stopwatch, RUN, env(), "TIC", budget=3)


def test_transition_values_are_distinct():
    assert NO is not END_TV and str(NO) == "No" and str(END_TV) == "End"
