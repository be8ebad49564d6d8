"""SMT-LIB encoding of the unrolled transition system.

Naming is injective: data variable ``v`` at step ``i`` is ``v__i``, the
``j``-th intermediate assignment inside step ``i`` is ``v__i_j``, control
boolean for state ``A.B`` is ``st.A.B__i`` and event ``E`` is ``ev.E__i``.
Identifiers cannot contain ``__`` or ``.``, so no two names collide and none
is an SMT-LIB reserved word.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .expr import Expr, In, is_nonlinear, to_smt
from .sts import phi_or
from .syntax import InvariantProperty, path_str

SORTS = {"int": "Int", "bool": "Bool"}


def data_name(v: str, i: int) -> str:
    return f"{v}__{i}"


def ssa_name(v: str, i: int, j: int) -> str:
    return f"{v}__{i}_{j}"


def ctrl_name(path, i: int) -> str:
    return f"st.{path_str(path)}__{i}"


def event_name(e: str, i: int) -> str:
    return f"ev.{e}__{i}"


def expr_at(e: Expr, i: int) -> str:
    """Render ``e`` with symbols, variables and ``in`` atoms read at step ``i``."""
    def name_of(leaf):
        if isinstance(leaf, In):
            return ctrl_name(leaf.path, i)
        return data_name(leaf.name, i)
    return to_smt(e, name_of)


@dataclass
class SmtScript:
    commands: list[str] = field(default_factory=list)
    value_names: list[str] = field(default_factory=list)  # for get-value on sat

    @property
    def text(self) -> str:
        return "\n".join(self.commands) + "\n"


def logic_for(sts, prop: Optional[InvariantProperty] = None) -> str:
    exprs = [t.guard for t in sts.transitions]
    exprs += [a.expr for t in sts.transitions for a in t.ops]
    if prop is not None:
        exprs.append(prop.expr)
    return "QF_NIA" if any(is_nonlinear(e) for e in exprs) else "QF_LIA"


def step_names(sts, i: int, controls: bool = True) -> list[str]:
    out = [data_name(v.name, i) for v in sts.data_vars]
    if controls:
        out += [ctrl_name(p, i) for p in sts.control_vars]
    return out


def declare_step(sts, i: int, controls: bool = True) -> list[str]:
    out = [f"(declare-const {data_name(v.name, i)} {SORTS[v.sort]})" for v in sts.data_vars]
    if controls:
        out += [f"(declare-const {ctrl_name(p, i)} Bool)" for p in sts.control_vars]
    return out


def encode_init(sts) -> list[str]:
    return [f"(assert {expr_at(sts.init_formula(), 0)})"]


def _exactly_one(names: list[str]) -> list[str]:
    if not names:
        return []
    if len(names) == 1:
        return [f"(assert {names[0]})"]
    out = [f"(assert (or {' '.join(names)}))"]
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            out.append(f"(assert (not (and {names[a]} {names[b]})))")
    return out


def ssa_lower(t, i: int, sorts: dict, counter: list[int]) -> tuple[list[str], dict[str, str]]:
    """Lower a transition's assignment chain to fresh intermediates.

    Returns the declarations/definitions and, per assigned variable, the SSA
    name holding its final value.  ``counter`` is shared across the step so
    intermediate names stay unique.  Definitions are unconditional: each
    intermediate is fresh and only read by its own transition's consequent.
    """
    current: dict[str, str] = {}
    cmds = []
    for a in t.ops:
        counter[0] += 1
        name = ssa_name(a.var, i, counter[0])
        rhs = to_smt(a.expr, lambda leaf: current.get(leaf.name, data_name(leaf.name, i)))
        cmds.append(f"(define-fun {name} () {SORTS[sorts[a.var]]} {rhs})")
        current[a.var] = name
    return cmds, current


def encode_step(sts, i: int) -> list[str]:
    """Declarations and the transition relation instance from step i to i+1."""
    cmds = declare_step(sts, i + 1)
    events = [event_name(e, i) for e in sts.events]
    cmds += [f"(declare-const {n} Bool)" for n in events]
    cmds += _exactly_one(events)
    if not events:
        # without events only initialization can take a step
        cmds.append(f"(assert {expr_at(phi_or(frozenset(), sts.control_vars), i)})")
    sorts = {v.name: v.sort for v in sts.data_vars}
    counter = [0]
    for t in sts.transitions:
        defs, current = ssa_lower(t, i, sorts, counter)
        cmds += defs
        ante = [expr_at(phi_or(t.src, sts.control_vars), i)]
        if t.event is not None:
            ante.append(event_name(t.event, i))
        ante += [expr_at(c, i) for c in t.conjuncts]
        cons = [expr_at(phi_or(t.dst, sts.control_vars), i + 1)]
        for v in sts.data_vars:
            cons.append(f"(= {data_name(v.name, i + 1)} {current.get(v.name, data_name(v.name, i))})")
        cmds.append(f"; {t.describe()}")
        cmds.append(f"(assert (=> {_and(ante)} {_and(cons)}))")
    return cmds


def _and(parts: list[str]) -> str:
    return parts[0] if len(parts) == 1 else f"(and {' '.join(parts)})"


def negated_property(prop: InvariantProperty, i: int) -> str:
    return f"(not {expr_at(prop.expr, i)})"


def header(sts, prop) -> list[str]:
    return ["(set-option :produce-models true)", f"(set-logic {logic_for(sts, prop)})"]


def encode_bmc_query(sts, prop: InvariantProperty, k: int) -> SmtScript:
    """Standalone script: Î(c0) ∧ ⋀_{i<k} R̂(ci, ci+1) ∧ ⋁_{i≤k} ¬φ(ci)."""
    cmds = [f"; {sts.program.name}: counterexample of length <= {k}"]
    cmds += header(sts, prop)
    cmds += declare_step(sts, 0)
    cmds += encode_init(sts)
    for i in range(k):
        cmds += encode_step(sts, i)
    bad = [negated_property(prop, i) for i in range(k + 1)]
    cmds.append(f"(assert {bad[0] if len(bad) == 1 else '(or ' + ' '.join(bad) + ')'})")
    cmds.append("(check-sat)")
    names = [n for i in range(k + 1) for n in step_names(sts, i)]
    names += [event_name(e, i) for i in range(k) for e in sts.events]
    return SmtScript(cmds, names)
