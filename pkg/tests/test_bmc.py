import json
import os
import sys
from dataclasses import replace

import pytest

from helpers import min_violation_depth, run_bmc
from sfbmc.bmc import BOUNDED_SAFE, UNKNOWN, VIOLATED
from sfbmc.counterexample import replay_validate
from sfbmc.parser import parse_property

pytestmark = pytest.mark.solver


def prop(prog, text):
    return parse_property(text, prog)


def test_toggle_bounded_safe(toggle):
    result = run_bmc(toggle, prop(toggle, "!(in(A) && in(B))"), kmax=10)
    assert result.verdict == BOUNDED_SAFE
    assert result.depth == 10
    assert [d.status for d in result.depths] == ["unsat"] * 11


def test_toggle_counterexample(toggle):
    p = prop(toggle, "!in(B)")
    result = run_bmc(toggle, p, kmax=5)
    ce = result.counterexample
    assert (result.verdict, result.depth) == (VIOLATED, min_violation_depth(toggle, p.expr, 5))
    assert [sorted(s.active) for s in ce.steps] == [[], [("A",)], [("B",)]]
    assert ce.events == ["FLIP"]
    assert ce.violated_at == 2
    assert replay_validate(ce, toggle, p)


def test_stopwatch_x5(stopwatch):
    p = prop(stopwatch, "cent >= 0 && cent <= 5")
    result = run_bmc(stopwatch, p, kmax=30)
    assert result.verdict == VIOLATED
    assert result.depth == min_violation_depth(stopwatch, p.expr, 30) == 8
    ce = result.counterexample
    assert ce.steps[-1].env["cent"] == 6
    assert ce.events == ["START"] + ["TIC"] * 6


def test_depth_zero_violation(stopwatch):
    result = run_bmc(stopwatch, prop(stopwatch, "cent == 1"), kmax=0)
    assert (result.verdict, result.depth) == (VIOLATED, 0)
    assert result.counterexample.events == []


@pytest.mark.parametrize("mode", [dict(incremental=False), dict(full_disjunction=True)])
def test_modes_agree(stopwatch, mode):
    p = prop(stopwatch, "cent <= 10 || in(Stop)")
    base = run_bmc(stopwatch, p, kmax=20)
    other = run_bmc(stopwatch, p, kmax=20, **mode)
    assert (base.verdict, base.depth) == (other.verdict, other.depth) == (VIOLATED, 13)


def test_verdict_stability(stopwatch):
    p = prop(stopwatch, "min == 0 || sec > 0")
    runs = [run_bmc(stopwatch, p, kmax=6) for _ in range(2)]
    assert {(r.verdict, r.depth) for r in runs} == {(BOUNDED_SAFE, 6)}


def test_bounded_safe_is_monotone(stopwatch):
    p = prop(stopwatch, "disp_cent <= cent || in(Run.Lap) || in(Stop)")
    assert run_bmc(stopwatch, p, kmax=8).verdict == BOUNDED_SAFE
    for k in range(0, 8, 3):
        assert run_bmc(stopwatch, p, kmax=k).verdict == BOUNDED_SAFE


def test_emit_smt(stopwatch, tmp_path):
    run_bmc(stopwatch, prop(stopwatch, "cent <= 2"), kmax=10, emit_smt=str(tmp_path))
    files = sorted(os.listdir(tmp_path))
    assert files[0] == "depth_000.smt2" and files[-1] == "depth_005.smt2"
    assert "=>" not in (tmp_path / "depth_000.smt2").read_text()


def test_prune_infeasible(stopwatch):
    result = run_bmc(stopwatch, prop(stopwatch, "cent <= 3"), kmax=10, prune_infeasible=True)
    assert (result.verdict, result.depth) == (VIOLATED, 6)


def test_missing_solver(stopwatch):
    result = run_bmc(stopwatch, prop(stopwatch, "cent >= 0"), kmax=2, command="/no/such/solver")
    assert result.verdict == UNKNOWN
    assert "not found" in result.reason


def test_solver_timeout_is_unknown(stopwatch, tmp_path):
    script = tmp_path / "hang.py"
    script.write_text("import sys\nfor line in sys.stdin:\n"
                      "    if not line.startswith('(check-sat'):\n        print('success', flush=True)\n")
    result = run_bmc(stopwatch, prop(stopwatch, "cent >= 0"), kmax=2,
                     command=[sys.executable, str(script)], timeout=0.5)
    assert result.verdict == UNKNOWN
    assert "timeout" in result.reason


def test_tampered_counterexample_fails_replay(stopwatch):
    p = prop(stopwatch, "cent <= 2")
    ce = run_bmc(stopwatch, p, kmax=10).counterexample
    steps = list(ce.steps)
    steps[3] = replace(steps[3], event="LAP")
    bad = replace(ce, steps=steps)
    replay = replay_validate(bad, stopwatch, p)
    assert not replay
    assert replay.divergence.startswith("first divergence at step")
    assert replay.diff["step"] == 3


def test_unknown_event_fails_replay(toggle):
    p = prop(toggle, "!in(B)")
    ce = run_bmc(toggle, p, kmax=3).counterexample
    steps = list(ce.steps)
    steps[2] = replace(steps[2], event="NOPE")
    assert "unknown event" in replay_validate(replace(ce, steps=steps), toggle, p).divergence


def test_json_report(stopwatch):
    result = run_bmc(stopwatch, prop(stopwatch, "cent <= 1"), kmax=10)
    data = json.loads(json.dumps(result.to_json()))
    assert data["verdict"] == "Violated"
    assert data["counterexample"]["events"] == ["START", "TIC", "TIC"]
    assert data["counterexample"]["steps"][0]["activeStates"] == []
