"""Symbolic small-step semantics.

A symbolic configuration keeps a substitution Δ from program variables to
expressions over the initial symbols ``g(v)`` together with a path
condition.  Every condition evaluation forks: one branch assumes the
condition, the other its negation.  Branches whose new conjunct folds to
``false`` are dropped and ``true`` conjuncts are not recorded.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Optional

from .derivation import Derivation
from .expr import TRUE, Expr, Sym, Unary, conj, evaluate, fold, is_bool_const, substitute
from .semantics import (DEFAULT_RULE_BUDGET, END_TV, NO, DivergenceError, Fire,
                        SemanticsError, active_child, enabled, inside, junction_list)
from .syntax import Action, And, Assign, Path, Program, Transition, path_str


@dataclass(frozen=True)
class SymState:
    active: frozenset
    delta: Mapping[str, Expr] = field(hash=False)
    pc: tuple[Expr, ...] = ()
    ops: tuple[Assign, ...] = ()  # assignments executed during the current step

    def path_condition(self) -> Expr:
        return conj(self.pc)


@dataclass(frozen=True)
class Successor:
    state: SymState
    conjuncts: tuple[Expr, ...]   # appended by this step
    derivation: Derivation

    @property
    def guard(self) -> Expr:
        return conj(self.conjuncts)


def initial_state(prog: Program, active=frozenset()) -> SymState:
    """Δ0 = g: every variable bound to its own symbol; pc = true."""
    return SymState(frozenset(active), {v.name: Sym(v.name) for v in prog.variables})


def sym_eval_cond(c: Expr, delta: Mapping[str, Expr]) -> Expr:
    """SB[[c]](Δ): the condition rewritten over the initial symbols."""
    return fold(substitute(c, var=lambda n: delta[n]))


def sym_exec_action(action: Action, delta: Mapping[str, Expr]) -> dict:
    """SA[[a]](Δ) by sequential substitution."""
    out = dict(delta)
    for a in action:
        out[a.var] = fold(substitute(a.expr, var=lambda n: out[n]))
    return out


def beta(delta: Mapping[str, Expr], env0: Mapping) -> dict:
    """Interpret Δ under the initial valuation: β(Δ, D0)(v) = Δ(v)[g(w) := D0(w)]."""
    return {v: evaluate(e, sym=lambda n: env0[n]) for v, e in delta.items()}


def eval_pc(pc, env0: Mapping) -> bool:
    exprs = pc if isinstance(pc, (tuple, list)) else (pc,)
    return all(bool(evaluate(e, sym=lambda n: env0[n])) for e in exprs)


class SymbolicEngine:
    """Branch enumeration for one event; each method yields (state, value, derivation)."""

    def __init__(self, prog: Program, event: Optional[str], budget: int = DEFAULT_RULE_BUDGET):
        self.prog = prog
        self.event = event
        self.budget = budget
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.budget:
            raise DivergenceError(f"step exceeded {self.budget} rule applications")

    # hooks for the two condition outcomes
    def fire_conjunct(self, c: Expr) -> Expr:
        return c

    def no_fire_conjunct(self, c: Expr) -> Expr:
        return Unary("!", c)

    def assume(self, st: SymState, c: Expr) -> Optional[SymState]:
        folded = sym_eval_cond(c, st.delta)
        if is_bool_const(folded, False):
            return None
        if is_bool_const(folded, True):
            return st
        return replace(st, pc=st.pc + (folded,))

    def execute(self, st: SymState, action: Action) -> SymState:
        if not action:
            return st
        return replace(st, delta=sym_exec_action(action, st.delta), ops=st.ops + tuple(action))

    @staticmethod
    def _new_conjunct(before: SymState, after: SymState) -> Optional[Expr]:
        return after.pc[-1] if len(after.pc) > len(before.pc) else None

    # transitions
    def trans(self, st: SymState, t: Transition, label: str):
        self.tick()
        subject = f"t {label}"
        if not enabled(t.event, self.event):
            yield st, NO, Derivation("t-NOT-ENABLED", subject, "step", "No")
            return
        fired = self.assume(st, self.fire_conjunct(t.cond))
        if fired is not None:
            tv = Fire(t.dest, t.trans_action)
            yield (self.execute(fired, t.cond_action), tv,
                   Derivation("t-FIRE", subject, "step", f"Fire({t.dest})",
                              conjunct=self._new_conjunct(st, fired)))
        held = self.assume(st, self.no_fire_conjunct(t.cond))
        if held is not None:
            yield held, NO, Derivation("t-NO-FIRE", subject, "step", "No",
                                       conjunct=self._new_conjunct(st, held))

    def tlist(self, st: SymState, ts, junctions, label: str, offset: int = 0):
        self.tick()
        subject = f"T {label}" + (f"[{offset}:]" if offset else "")
        if not ts:
            yield st, END_TV, Derivation("T-∅", subject, "step", "End")
            return
        t, rest = ts[0], ts[1:]
        for st1, tv1, d1 in self.trans(st, t, f"{label}[{offset}]"):
            if tv1 is NO:
                if not rest:
                    yield st1, NO, Derivation("T-NO-LAST", subject, "step", "No", (d1,))
                    continue
                for st2, tv2, d2 in self.tlist(st1, rest, junctions, label, offset + 1):
                    yield st2, tv2, Derivation("T-NO", subject, "step", str(tv2), (d1, d2))
                continue
            jl = junction_list(tv1.dest, junctions)
            if jl is None:
                tv = Fire(t.dest_path, tv1.action)
                yield st1, tv, Derivation("T-FIRE", subject, "step", str(tv), (d1,))
                continue
            for st2, tv2, d2 in self.tlist(st1, jl, junctions, tv1.dest):
                if isinstance(tv2, Fire):
                    tv = Fire(tv2.dest, tv1.action + tv2.action)
                    yield st2, tv, Derivation("T-FIRE-J-F", subject, "step", str(tv), (d1, d2))
                elif tv2 is END_TV:
                    yield st2, END_TV, Derivation("T-END", subject, "step", "End", (d1, d2))
                else:
                    for st3, tv3, d3 in self.tlist(st2, rest, junctions, label, offset + 1):
                        yield st3, tv3, Derivation("T-FIRE-J-N", subject, "step", str(tv3),
                                                   (d1, d2, d3))

    # state definitions
    def step_sd(self, st, path: Path, sd, outer_junctions):
        self.tick()
        subject = f"sd {path_str(path)}"
        name = path_str(path)
        own = dict(sd.junctions)
        for st1, tvo, d_out in self.tlist(st, sd.outer, outer_junctions, f"{name}.outer"):
            if isinstance(tvo, Fire):
                st2 = self.execute(st1, tvo.action)
                for st3, d_exit in self.exit_comp(st2, path, sd.comp):
                    tv = Fire(tvo.dest)
                    yield (self.execute(st3, sd.exit), tv,
                           Derivation("SD-FIRE", subject, "step", str(tv), (d_out, d_exit)))
                continue
            st2 = self.execute(st1, sd.during)
            for st3, tvi, d_in in self.tlist(st2, sd.inner, own, f"{name}.inner"):
                for st4, tvc, d_c in self.step_comp(st3, path, sd.comp, own, tvi):
                    if isinstance(tvc, Fire):
                        st5 = self.execute(self.execute(st4, tvc.action), sd.exit)
                        tv = Fire(tvc.dest)
                        yield st5, tv, Derivation("SD-INT-FIRE", subject, "step", str(tv),
                                                  (d_out, d_in, d_c))
                    else:
                        yield st4, NO, Derivation("SD-NO", subject, "step", "No",
                                                  (d_out, d_in, d_c))

    def init_sd(self, st, path: Path, sd, sub: Path):
        self.tick()
        st1 = self.execute(st, sd.entry)
        for st2, d in self.init_comp(st1, path, sd.comp, dict(sd.junctions), sub):
            yield st2, Derivation("SD-INIT", f"sd {path_str(path)}", "init", premises=(d,))

    def exit_sd(self, st, path: Path, sd):
        self.tick()
        for st1, d in self.exit_comp(st, path, sd.comp):
            yield self.execute(st1, sd.exit), Derivation("SD-EXIT", f"sd {path_str(path)}",
                                                         "exit", premises=(d,))

    # compositions
    @staticmethod
    def _comp_subject(comp, path: Path) -> str:
        kind = "And" if isinstance(comp, And) else "Or"
        return f"{kind} {path_str(path) or '<root>'}"

    def step_comp(self, st, path: Path, comp, junctions, tv):
        self.tick()
        subject = self._comp_subject(comp, path)
        if isinstance(comp, And):
            if isinstance(tv, Fire):
                raise SemanticsError(f"firing into parallel state {path_str(path)}")
            yield from self._and_step(st, path, list(comp.states), junctions, (), subject)
            return
        if not comp.states:
            out = tv if isinstance(tv, Fire) else NO
            yield st, out, Derivation("OR-INIT-NO-STATE", subject, "step", str(out))
            return
        states = dict(comp.states)
        s0 = active_child(comp, path, st.active)
        if s0 is None:
            raise SemanticsError(f"no active substate in {path_str(path) or '<root>'}")
        p0 = path + (s0,)
        if isinstance(tv, Fire):
            st1 = self.execute(st, tv.action)
            for st2, d_exit in self.exit_sd(st1, p0, states[s0]):
                st2 = replace(st2, active=st2.active - {p0})
                if inside(tv.dest, path):
                    for st3, d_init in self.enter(st2, path, states, tv.dest):
                        yield st3, NO, Derivation("OR-EXT-FIRE", subject, "step", "No",
                                                  (d_exit, d_init))
                else:
                    out = Fire(tv.dest)
                    yield st2, out, Derivation("OR-EXT-FIRE-OUT", subject, "step", str(out),
                                               (d_exit,))
            return
        for st1, out, d_sd in self.step_sd(st, p0, states[s0], junctions):
            if out is NO:
                yield st1, NO, Derivation("OR-NO", subject, "step", "No", (d_sd,))
                continue
            st1 = replace(st1, active=st1.active - {p0})
            if inside(out.dest, path):
                for st2, d_init in self.enter(st1, path, states, out.dest):
                    yield st2, NO, Derivation("OR-INT-FIRE", subject, "step", "No",
                                              (d_sd, d_init))
            else:
                yield st1, out, Derivation("OR-FIRE", subject, "step", str(out), (d_sd,))

    def _and_step(self, st, path, children, junctions, done, subject):
        if not children:
            yield st, NO, Derivation("AND", subject, "step", "No", done)
            return
        (name, sd), rest = children[0], children[1:]
        for st1, out, d in self.step_sd(st, path + (name,), sd, junctions):
            if out is not NO:
                raise SemanticsError(f"parallel substate {path_str(path + (name,))} fired")
            yield from self._and_step(st1, path, rest, junctions, done + (d,), subject)

    def enter(self, st, path: Path, states, dest: Path):
        s1 = dest[len(path)]
        st = replace(st, active=st.active | {path + (s1,)})
        yield from self.init_sd(st, path + (s1,), states[s1], dest[len(path) + 1:])

    def init_comp(self, st, path: Path, comp, junctions, sub: Path):
        self.tick()
        subject = self._comp_subject(comp, path)
        if isinstance(comp, And):
            st = replace(st, active=st.active | {path + (n,) for n, _ in comp.states})
            yield from self._and_init(st, path, list(comp.states), sub, (), subject)
            return
        if not comp.states:
            yield st, Derivation("OR-INIT-NO-STATE", subject, "init")
            return
        states = dict(comp.states)
        if sub:
            for st1, d in self.enter(st, path, states, path + sub):
                yield st1, Derivation("OR-INIT", subject, "init", premises=(d,))
            return
        for st1, tv, d_t in self.tlist(st, comp.default, junctions, f"{path_str(path) or '<root>'}.default"):
            if not isinstance(tv, Fire) or not inside(tv.dest, path):
                raise SemanticsError(f"default transitions of {path_str(path) or '<root>'} did not fire")
            for st2, d_init in self.enter(st1, path, states, tv.dest):
                yield (self.execute(st2, tv.action),
                       Derivation("OR-INIT-∅p", subject, "init", premises=(d_t, d_init)))

    def _and_init(self, st, path, children, sub, done, subject):
        if not children:
            yield st, Derivation("AND-INIT", subject, "init", premises=done)
            return
        (name, sd), rest = children[0], children[1:]
        child_sub = sub[1:] if sub and sub[0] == name else ()
        for st1, d in self.init_sd(st, path + (name,), sd, child_sub):
            yield from self._and_init(st1, path, rest, sub, done + (d,), subject)

    def exit_comp(self, st, path: Path, comp):
        self.tick()
        subject = self._comp_subject(comp, path)
        if isinstance(comp, And):
            yield from self._and_exit(st, path, list(reversed(comp.states)), (), subject)
            return
        s0 = active_child(comp, path, st.active) if comp.states else None
        if s0 is None:
            yield st, Derivation("OR-INIT-NO-STATE", subject, "exit")
            return
        p0 = path + (s0,)
        for st1, d in self.exit_sd(st, p0, dict(comp.states)[s0]):
            yield replace(st1, active=st1.active - {p0}), Derivation("OR-EXIT", subject, "exit",
                                                                      premises=(d,))

    def _and_exit(self, st, path, children, done, subject):
        if not children:
            yield st, Derivation("AND-EXIT", subject, "exit", premises=done)
            return
        (name, sd), rest = children[0], children[1:]
        for st1, d in self.exit_sd(st, path + (name,), sd):
            st1 = replace(st1, active=st1.active - {path + (name,)})
            yield from self._and_exit(st1, path, rest, done + (d,), subject)


def ssos_step(prog: Program, st: SymState, event: Optional[str],
              engine_cls=SymbolicEngine, budget: int = DEFAULT_RULE_BUDGET) -> list[Successor]:
    """All symbolic successors of ``st`` for ``event``.

    From the empty control point the step is initialization and ``event``
    is ignored.  The successors' new conjuncts partition the valuations.
    """
    engine = engine_cls(prog, event, budget)
    start = replace(st, ops=())
    out = []
    if not st.active:
        for st1, d in engine.init_comp(start, (), prog.root, dict(prog.junctions), ()):
            out.append(Successor(st1, st1.pc[len(st.pc):], d))
        return out
    for st1, tv, d in engine.step_comp(start, (), prog.root, dict(prog.junctions), NO):
        if tv is not NO:
            raise SemanticsError(f"root composition returned {tv}")
        out.append(Successor(st1, st1.pc[len(st.pc):], d))
    return out
