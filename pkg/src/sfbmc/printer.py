"""Canonical source text for programs; ``parse_model(print_model(p)) == p``."""
from __future__ import annotations

from .expr import TRUE, render
from .syntax import And, Program, StateDef, Transition


def _lit(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _actions(actions) -> str:
    return " ".join(f"{a.var} := {render(a.expr)};" for a in actions)


def print_transition(t: Transition) -> str:
    parts = []
    if t.event is not None:
        parts.append(f"on {t.event}")
    if t.cond != TRUE:
        parts.append(f"[{render(t.cond)}]")
    if t.cond_action:
        parts.append(f"/ {{ {_actions(t.cond_action)} }}")
    parts.append(f"-> {t.dest}")
    if t.trans_action:
        parts.append(f"/ {{ {_actions(t.trans_action)} }}")
    return " ".join(parts) + ";"


def _block(out: list[str], indent: str, head: str, transitions) -> None:
    out.append(f"{indent}{head} {{")
    for t in transitions:
        out.append(f"{indent}  {print_transition(t)}")
    out.append(f"{indent}}}")


def _junctions(out: list[str], indent: str, junctions) -> None:
    out.append(f"{indent}junctions {{")
    for name, ts in junctions:
        _block(out, indent + "  ", f"{name}:", ts)
    out.append(f"{indent}}}")


def _component(out: list[str], indent: str, comp, junctions=()) -> None:
    kind = "and" if isinstance(comp, And) else "or"
    out.append(f"{indent}{kind} {{")
    for name, sd in comp.states:
        _state(out, indent + "  ", name, sd)
    if kind == "or" and comp.default:
        _block(out, indent + "  ", "transitions", comp.default)
    if junctions:
        _junctions(out, indent + "  ", junctions)
    out.append(f"{indent}}}")


def _state(out: list[str], indent: str, name: str, sd: StateDef) -> None:
    out.append(f"{indent}state {name} {{")
    inner = indent + "  "
    for label, actions in (("entry", sd.entry), ("during", sd.during), ("exit", sd.exit)):
        if actions:
            out.append(f"{inner}{label}: {_actions(actions)}")
    if sd.inner:
        _block(out, inner, "inner", sd.inner)
    if sd.outer:
        _block(out, inner, "outer", sd.outer)
    if sd.junctions:
        _junctions(out, inner, sd.junctions)
    if sd.comp.states or getattr(sd.comp, "default", ()) or isinstance(sd.comp, And):
        _component(out, inner, sd.comp)
    out.append(f"{indent}}}")


def print_model(p: Program) -> str:
    out = [f"program {p.name};"]
    if p.events:
        out.append(f"events {', '.join(p.events)};")
    for v in p.variables:
        out.append(f"var {v.name}: {v.sort} = {_lit(v.init)};")
    _component(out, "", p.root, p.junctions)
    return "\n".join(out) + "\n"
