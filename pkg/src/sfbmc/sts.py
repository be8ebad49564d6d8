"""Symbolic transition system built from exhaustive symbolic steps.

Starting from the empty control point, every reachable control point is
stepped symbolically once per event (initialization uses the pseudo-event
``None``).  Each symbolic successor becomes one program transition

    Φ_Or(src) ∧ event ∧ guard  ⇒  Φ_Or(dst)' ∧ ⋀ v' = Δ(v)

and the transition relation is the conjunction of all of them.
"""
from __future__ import annotations

import json
import random
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .concrete import sos_step
from .derivation import Derivation
from .expr import Binary, Const, Expr, In, Sym, Unary, conj, disj, render
from .symbolic import beta, eval_pc, initial_state, ssos_step
from .syntax import Assign, Path, Program, VarDecl, format_control_point, path_str


@dataclass(frozen=True)
class ProgramTransition:
    index: int
    src: frozenset
    event: Optional[str]
    conjuncts: tuple[Expr, ...]
    update: Mapping[str, Expr] = field(hash=False)
    ops: tuple[Assign, ...]
    dst: frozenset
    derivation: Derivation = field(compare=False)

    @property
    def guard(self) -> Expr:
        return conj(self.conjuncts)

    def describe(self) -> str:
        ev = self.event or "(init)"
        return (f"T{self.index}: {format_control_point(self.src)} --{ev}--> "
                f"{format_control_point(self.dst)} when {render(self.guard)}")


@dataclass(frozen=True)
class TransitionFormula:
    """Antecedent and consequent parts of one implication of the relation."""
    src_phi: Expr
    event: Optional[str]
    guard: Expr
    dst_phi: Expr
    updates: tuple[tuple[str, Expr], ...]


@dataclass
class STS:
    program: Program
    control_vars: list[Path]
    data_vars: list[VarDecl]
    events: list[str]
    control_points: list[frozenset]
    transitions: list[ProgramTransition]
    seconds: float = 0.0

    def init_formula(self) -> Expr:
        """Î: nothing active and every variable at its declared value."""
        parts = [phi_or(frozenset(), self.control_vars)]
        parts += [Binary("==", Sym(v.name), Const(v.init)) for v in self.data_vars]
        return conj(parts)

    def formulas(self) -> list[TransitionFormula]:
        return [phi_transition(t, self.control_vars) for t in self.transitions]

    def to_json(self) -> dict:
        def cp(c):
            return sorted(path_str(p) for p in c)
        return {
            "program": self.program.name,
            "events": list(self.events),
            "dataVars": [{"name": v.name, "sort": v.sort, "init": v.init} for v in self.data_vars],
            "controlVars": [path_str(p) for p in self.control_vars],
            "controlPoints": [cp(c) for c in self.control_points],
            "init": render(self.init_formula(), sym_fmt=str),
            "transitions": [{
                "id": t.index, "src": cp(t.src), "event": t.event,
                "guard": render(t.guard, sym_fmt=str),
                "update": {v: render(e, sym_fmt=str) for v, e in t.update.items()},
                "dst": cp(t.dst), "rule": t.derivation.rule,
            } for t in self.transitions],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def phi_or(cp, control_vars) -> Expr:
    """Characteristic formula of a control point over all control booleans."""
    return conj(In(p) if p in cp else Unary("!", In(p)) for p in control_vars)


def phi_transition(t: ProgramTransition, control_vars) -> TransitionFormula:
    return TransitionFormula(
        src_phi=phi_or(t.src, control_vars), event=t.event, guard=t.guard,
        dst_phi=phi_or(t.dst, control_vars), updates=tuple(t.update.items()),
    )


def derive_transitions(prog: Program, prune=None) -> tuple[list[frozenset], list[ProgramTransition]]:
    """Reachable control points and one transition per symbolic successor.

    ``prune`` is an optional predicate over a guard; successors it rejects
    (typically solver-infeasible ones) are dropped.
    """
    points = [frozenset()]
    seen = {frozenset()}
    transitions: list[ProgramTransition] = []
    i = 0
    while i < len(points):
        cp = points[i]
        i += 1
        for event in ([None] if not cp else list(prog.events)):
            for succ in ssos_step(prog, initial_state(prog, cp), event):
                if prune is not None and not prune(succ.guard):
                    continue
                dst = succ.state.active
                transitions.append(ProgramTransition(
                    len(transitions), cp, event, succ.conjuncts, dict(succ.state.delta),
                    succ.state.ops, dst, succ.derivation))
                if dst not in seen:
                    seen.add(dst)
                    points.append(dst)
    return points, transitions


def build_sts(prog: Program, prune=None) -> STS:
    start = time.perf_counter()
    points, transitions = derive_transitions(prog, prune)
    return STS(prog, prog.state_paths(), list(prog.variables), list(prog.events),
               points, transitions, time.perf_counter() - start)


# -- checks -------------------------------------------------------------------

@dataclass
class PartitionReport:
    ok: bool
    groups: int = 0
    problems: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def groups(sts: STS) -> dict:
    out = defaultdict(list)
    for t in sts.transitions:
        out[(t.src, t.event)].append(t)
    return out


def check_partition(sts: STS, session) -> PartitionReport:
    """Per (control point, event): guards pairwise disjoint and jointly exhaustive."""
    from .smtlib import declare_step, expr_at
    report = PartitionReport(True)
    session.push()
    session.send(*declare_step(sts, 0, controls=False))
    for (cp, event), ts in groups(sts).items():
        report.groups += 1
        label = f"{format_control_point(cp)} on {event or '(init)'}"
        for a in range(len(ts)):
            for b in range(a + 1, len(ts)):
                both = Binary("&&", ts[a].guard, ts[b].guard)
                if session.is_sat(expr_at(both, 0)):
                    report.ok = False
                    report.problems.append(f"{label}: T{ts[a].index} and T{ts[b].index} overlap")
        uncovered = Unary("!", disj(t.guard for t in ts))
        if session.is_sat(expr_at(uncovered, 0)):
            report.ok = False
            report.problems.append(f"{label}: guards do not cover all valuations")
    session.pop()
    return report


def _sample_env(sts: STS, rng: random.Random, span: int) -> dict:
    return {v.name: (rng.random() < 0.5) if v.sort == "bool" else rng.randint(-span, span)
            for v in sts.data_vars}


def check_exhaustive_determinism(sts: STS, samples: int = 200, span: int = 3,
                                 seed: int = 0) -> list[str]:
    """Evaluate guards on sampled small valuations; each must select one transition."""
    rng = random.Random(seed)
    problems = []
    for (cp, event), ts in groups(sts).items():
        for _ in range(samples):
            env = _sample_env(sts, rng, span)
            hits = [t.index for t in ts if eval_pc(t.conjuncts, env)]
            if len(hits) != 1:
                problems.append(f"{format_control_point(cp)} on {event}: {env} selects {hits}")
                break
    return problems


def check_transition_soundness(sts: STS, samples: int = 50, span: int = 110,
                               seed: int = 0) -> list[str]:
    """Each transition, fired concretely on valuations meeting its guard, lands where it says."""
    rng = random.Random(seed)
    prog = sts.program
    problems = []
    for t in sts.transitions:
        for _ in range(samples):
            env = _sample_env(sts, rng, span)
            if not eval_pc(t.conjuncts, env):
                continue
            active, out = sos_step(prog, t.src, env, t.event)
            if active != t.dst or out != beta(t.update, env):
                problems.append(f"T{t.index} disagrees with the concrete step from {env}")
                break
    return problems
