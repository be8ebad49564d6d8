"""Concrete small-step interpreter: the reference semantics.

A configuration is a pair (active state paths, environment).  One call to
``sos_step`` processes a single input event; ``sos_init`` performs the
initialization that precedes the first event.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .expr import eval_in_env, evaluate
from .semantics import (DEFAULT_RULE_BUDGET, END_TV, NO, DivergenceError, Fire,
                        SemanticsError, active_child, enabled, inside, junction_list)
from .syntax import And, Or, Path, Program

Environment = dict


def eval_cond(c, env: Mapping) -> bool:
    return bool(eval_in_env(c, env))


def exec_action(action, env: Mapping) -> Environment:
    """Run assignments left to right; each sees the effect of the previous ones."""
    out = dict(env)
    for a in action:
        out[a.var] = eval_in_env(a.expr, out)
    return out


@dataclass(frozen=True)
class TraceStep:
    event: Optional[str]
    env: Mapping = field(hash=False)
    active: frozenset

    def to_json(self, index: int) -> dict:
        return {"step": index, "event": self.event,
                "activeStates": sorted(".".join(p) for p in self.active),
                "vars": dict(self.env)}


class _Machine:
    def __init__(self, prog: Program, event, budget: int):
        self.prog = prog
        self.event = event
        self.budget = budget
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.budget:
            raise DivergenceError(f"step exceeded {self.budget} rule applications")

    # transitions and transition lists
    def trans(self, t, env):
        self.tick()
        if not enabled(t.event, self.event):
            return env, NO
        if eval_cond(t.cond, env):
            return exec_action(t.cond_action, env), Fire(t.dest, t.trans_action)
        return env, NO

    def tlist(self, ts, junctions, env):
        self.tick()
        if not ts:
            return env, END_TV
        t, rest = ts[0], ts[1:]
        env, tv = self.trans(t, env)
        if tv is NO:
            return (env, NO) if not rest else self.tlist(rest, junctions, env)
        jl = junction_list(tv.dest, junctions)
        if jl is None:
            return env, Fire(t.dest_path, tv.action)
        env, jtv = self.tlist(jl, junctions, env)
        if isinstance(jtv, Fire):
            return env, Fire(jtv.dest, tv.action + jtv.action)
        if jtv is END_TV:
            return env, END_TV
        return self.tlist(rest, junctions, env)  # backtrack past the junction

    # state definitions
    def step_sd(self, path, sd, outer_junctions, active, env):
        self.tick()
        env, tvo = self.tlist(sd.outer, outer_junctions, env)
        if isinstance(tvo, Fire):
            env = exec_action(tvo.action, env)
            active, env = self.exit_comp(path, sd.comp, active, env)
            return active, exec_action(sd.exit, env), Fire(tvo.dest)
        env = exec_action(sd.during, env)
        own = dict(sd.junctions)
        env, tvi = self.tlist(sd.inner, own, env)
        active, env, tvc = self.step_comp(path, sd.comp, own, tvi, active, env)
        if isinstance(tvc, Fire):
            env = exec_action(tvc.action, env)
            return active, exec_action(sd.exit, env), Fire(tvc.dest)
        return active, env, NO

    def init_sd(self, path, sd, sub, active, env):
        self.tick()
        env = exec_action(sd.entry, env)
        return self.init_comp(path, sd.comp, dict(sd.junctions), sub, active, env)

    def exit_sd(self, path, sd, active, env):
        self.tick()
        active, env = self.exit_comp(path, sd.comp, active, env)
        return active, exec_action(sd.exit, env)

    # compositions
    def step_comp(self, path, comp, junctions, tv, active, env):
        self.tick()
        if isinstance(comp, And):
            if isinstance(tv, Fire):
                raise SemanticsError(f"firing into parallel state {'.'.join(path)}")
            for name, sd in comp.states:
                active, env, out = self.step_sd(path + (name,), sd, junctions, active, env)
                if out is not NO:
                    raise SemanticsError(f"parallel substate {'.'.join(path + (name,))} fired")
            return active, env, NO
        if not comp.states:
            return active, env, tv if isinstance(tv, Fire) else NO
        states = dict(comp.states)
        s0 = active_child(comp, path, active)
        if s0 is None:
            raise SemanticsError(f"no active substate in {'.'.join(path) or '<root>'}")
        if isinstance(tv, Fire):
            env = exec_action(tv.action, env)
            active, env = self.exit_sd(path + (s0,), states[s0], active, env)
            active = active - {path + (s0,)}
            if inside(tv.dest, path):
                active, env = self.enter(path, states, tv.dest, active, env)
                return active, env, NO
            return active, env, Fire(tv.dest)
        active, env, out = self.step_sd(path + (s0,), states[s0], junctions, active, env)
        if out is NO:
            return active, env, NO
        active = active - {path + (s0,)}
        if inside(out.dest, path):
            active, env = self.enter(path, states, out.dest, active, env)
            return active, env, NO
        return active, env, out

    def enter(self, path, states, dest, active, env):
        s1 = dest[len(path)]
        active = active | {path + (s1,)}
        return self.init_sd(path + (s1,), states[s1], dest[len(path) + 1:], active, env)

    def init_comp(self, path, comp, junctions, sub, active, env):
        self.tick()
        if isinstance(comp, And):
            for name, sd in comp.states:
                active = active | {path + (name,)}
            for name, sd in comp.states:
                child_sub = sub[1:] if sub and sub[0] == name else ()
                active, env = self.init_sd(path + (name,), sd, child_sub, active, env)
            return active, env
        if not comp.states:
            return active, env
        states = dict(comp.states)
        if sub:
            return self.enter(path, states, path + sub, active, env)
        env, tv = self.tlist(comp.default, junctions, env)
        if not isinstance(tv, Fire) or not inside(tv.dest, path):
            raise SemanticsError(f"default transitions of {'.'.join(path) or '<root>'} did not fire")
        active, env = self.enter(path, states, tv.dest, active, env)
        return active, exec_action(tv.action, env)

    def exit_comp(self, path, comp, active, env):
        self.tick()
        if isinstance(comp, And):
            for name, sd in reversed(comp.states):
                active, env = self.exit_sd(path + (name,), sd, active, env)
            return active - {path + (name,) for name, _ in comp.states}, env
        if not comp.states:
            return active, env
        s0 = active_child(comp, path, active)
        if s0 is None:
            return active, env
        active, env = self.exit_sd(path + (s0,), dict(comp.states)[s0], active, env)
        return active - {path + (s0,)}, env


def sos_init(prog: Program, env: Optional[Mapping] = None,
             budget: int = DEFAULT_RULE_BUDGET) -> tuple[frozenset, Environment]:
    """Enter the root composition through its default transitions."""
    env = prog.initial_env() if env is None else dict(env)
    m = _Machine(prog, None, budget)
    active, env = m.init_comp((), prog.root, dict(prog.junctions), (), frozenset(), env)
    return frozenset(active), env


def sos_step(prog: Program, active, env: Mapping, event: Optional[str],
             budget: int = DEFAULT_RULE_BUDGET) -> tuple[frozenset, Environment]:
    """One macro step.  From the empty control point this is initialization."""
    if not active:
        return sos_init(prog, env, budget)
    m = _Machine(prog, event, budget)
    active, env, tv = m.step_comp((), prog.root, dict(prog.junctions), NO, frozenset(active), dict(env))
    if tv is not NO:
        raise SemanticsError(f"root composition returned {tv}")
    return frozenset(active), env


def run_trace(prog: Program, events: Sequence[str], env: Optional[Mapping] = None,
              budget: int = DEFAULT_RULE_BUDGET) -> list[TraceStep]:
    """Initialize, then process ``events`` in order; entry 0 is the initialized configuration."""
    unknown = [e for e in events if e not in prog.events]
    if unknown:
        raise ValueError(f"unknown event {unknown[0]}")
    active, env = sos_init(prog, env, budget)
    trace = [TraceStep(None, env, active)]
    for e in events:
        active, env = sos_step(prog, active, env, e, budget)
        trace.append(TraceStep(e, env, active))
    return trace


def holds(prop_expr, active, env: Mapping) -> bool:
    """Evaluate an invariant on a concrete configuration."""
    return bool(evaluate(prop_expr, var=lambda n: env[n], active=lambda p: p in active))
