import random
import re

import pytest

from sfbmc.expr import Binary, Const, Sym
from sfbmc.parser import parse_model, parse_property
from sfbmc.smtlib import (ctrl_name, data_name, declare_step, encode_bmc_query, encode_step,
                          event_name, logic_for, ssa_name)
from sfbmc.solver import SolverSession, solve
from sfbmc.sts import build_sts
from sfbmc.symbolic import beta


def test_names():
    assert data_name("cent", 3) == "cent__3"
    assert ssa_name("cent", 3, 2) == "cent__3_2"
    assert ctrl_name(("Run", "Running"), 0) == "st.Run.Running__0"
    assert event_name("TIC", 4) == "ev.TIC__4"


def test_depth_zero_has_no_relation(stopwatch_sts, stopwatch):
    text = encode_bmc_query(stopwatch_sts, parse_property("cent == 1", stopwatch), 0).text
    assert "=>" not in text
    assert "ev." not in text
    assert "__1" not in text
    assert text.rstrip().endswith("(check-sat)")


def test_relation_has_one_implication_per_transition(stopwatch_sts):
    cmds = encode_step(stopwatch_sts, 0)
    assert sum(c.startswith("(assert (=>") for c in cmds) == 22


def test_exactly_one_event(stopwatch_sts):
    text = "\n".join(encode_step(stopwatch_sts, 2))
    assert "(assert (or ev.START__2 ev.LAP__2 ev.TIC__2))" in text
    assert text.count("(assert (not (and ev.") == 3


def test_ssa_intermediates_are_unique(stopwatch_sts):
    cmds = encode_step(stopwatch_sts, 5)
    defined = [m.group(1) for c in cmds for m in [re.match(r"\(define-fun (\S+) ", c)] if m]
    assert defined and len(defined) == len(set(defined))
    assert all(re.fullmatch(r"[a-z_]+__5_\d+", n) for n in defined)


def test_logic(stopwatch_sts, stopwatch):
    assert logic_for(stopwatch_sts) == "QF_LIA"
    prog = parse_model("program P; events E; var x: int = 1; or { state A {"
                       " outer { on E / { x := x * x; } -> A; } } transitions { -> A; } }")
    assert logic_for(build_sts(prog)) == "QF_NIA"


@pytest.mark.solver
def test_toggle_exclusive_unsat(toggle_sts, toggle):
    script = encode_bmc_query(toggle_sts, parse_property("!(in(A) && in(B))", toggle), 2)
    assert solve(script).status == "unsat"


@pytest.mark.solver
def test_stopwatch_violation_sat(stopwatch_sts, stopwatch):
    script = encode_bmc_query(stopwatch_sts, parse_property("cent <= 5", stopwatch), 8)
    verdict = solve(script)
    assert verdict.status == "sat"
    assert sum(verdict.model[event_name("TIC", i)] for i in range(8)) >= 6


@pytest.mark.solver
def test_ssa_matches_symbolic_update(stopwatch_sts):
    """Pin the source valuation, take one step, and compare with β(Δ, D0)."""
    rng = random.Random(4)
    compared = 0
    with SolverSession() as session:
        for t in stopwatch_sts.transitions * 20:
            if not t.src:
                continue
            env0 = {v.name: rng.choice([0, 1, 59, 60, 99, 100, rng.randint(0, 120)])
                    for v in stopwatch_sts.data_vars}
            if not all(bool(beta({"c": c}, env0)["c"]) for c in t.conjuncts):
                continue
            compared += 1
            session.push()
            session.send(*declare_step(stopwatch_sts, 0), *encode_step(stopwatch_sts, 0))
            for p in stopwatch_sts.control_vars:
                lit = ctrl_name(p, 0)
                session.send(f"(assert {lit if p in t.src else f'(not {lit})'})")
            for v, val in env0.items():
                session.send(f"(assert (= {data_name(v, 0)} {val}))")
            session.send(f"(assert {event_name(t.event, 0)})")
            assert session.check_sat() == "sat"
            model = session.get_values([data_name(v, 1) for v in env0])
            session.pop()
            assert {v: model[data_name(v, 1)] for v in env0} == beta(t.update, env0), t.describe()
    assert compared >= 50
