"""Static well-formedness checks for chart programs.

The checks keep every program inside the fragment the step rules cover:
destinations resolve, junction networks are acyclic, default transition
lists always fire, and parallel substates never hand a firing upward.
"""
from __future__ import annotations

from typing import Iterator

from .expr import BOOL, TRUE, sort_of
from .parser import KEYWORDS
from .syntax import END, And, Or, Path, Program, StateDef, Transition, path_str

def _where(path: Path, part: str) -> str:
    return f"{path_str(path) or '<root>'}/{part}"


def _lists(prog: Program) -> Iterator[tuple[str, Path, tuple[Transition, ...]]]:
    """(location, scope path, transitions) for every transition list."""
    for name, ts in prog.junctions:
        yield _where((), f"junction {name}"), (), ts
    if isinstance(prog.root, Or):
        yield _where((), "default"), (), prog.root.default
    for path, sd in prog.states():
        parent = path[:-1]
        yield _where(path, "outer"), parent, sd.outer
        yield _where(path, "inner"), path, sd.inner
        for name, ts in sd.junctions:
            yield _where(path, f"junction {name}"), path, ts
        if isinstance(sd.comp, Or):
            yield _where(path, "default"), path, sd.comp.default


def final_destinations(prog: Program, scope: Path, ts, _seen=()) -> set[str]:
    """State destinations (and ``end``) reachable through junction chains."""
    junctions = prog.junction_scope(scope)
    out: set[str] = set()
    for t in ts:
        if t.dest in junctions:
            if t.dest not in _seen:
                out |= final_destinations(prog, scope, junctions[t.dest], _seen + (t.dest,))
        else:
            out.add(t.dest)
    return out


def _total(prog: Program, scope: Path, ts, _seen=()) -> bool:
    """A list that can never yield No or End: its last element always fires to a state."""
    if not ts:
        return False
    last = ts[-1]
    if last.event is not None or last.cond != TRUE:
        return False
    junctions = prog.junction_scope(scope)
    if last.dest == END:
        return False
    if last.dest in junctions:
        if last.dest in _seen:
            return False
        return _total(prog, scope, junctions[last.dest], _seen + (last.dest,))
    return True


def _may_fail(ts) -> bool:
    """Whether a non-empty list can yield No: only when its last transition may not fire.

    An unguarded last transition into a failing junction backtracks into the
    empty remainder, which yields End rather than No.
    """
    last = ts[-1]
    return last.event is not None or last.cond != TRUE


def _may_end(prog: Program, scope: Path, ts, _seen=()) -> bool:
    """Whether the list can yield End (``end``, a terminal junction, or exhausted backtracking)."""
    junctions = prog.junction_scope(scope)
    for i, t in enumerate(ts):
        if t.dest == END:
            return True
        if t.dest in junctions and t.dest not in _seen:
            jl = junctions[t.dest]
            if not jl or _may_end(prog, scope, jl, _seen + (t.dest,)):
                return True
            if i == len(ts) - 1 and _may_fail(jl):
                return True
    return False


def _inside(dest: Path, path: Path) -> bool:
    return len(dest) > len(path) and dest[:len(path)] == path


def validate_model(prog: Program) -> list[str]:
    """Return diagnostics; an empty list means the program is well formed."""
    diags: list[str] = []
    paths = set(prog.state_paths())
    state_names = {p[-1] for p in paths}
    events = set(prog.events)

    def var_sort(name):
        return prog.var_sort(name)

    # identifiers: keep SMT names injective
    idents = [("event", e) for e in prog.events] + [("variable", v.name) for v in prog.variables]
    idents += [("state", p[-1]) for p in paths]
    idents += [("junction", j) for j, _ in prog.junctions]
    idents += [("junction", j) for _, sd in prog.states() for j, _ in sd.junctions]
    for kind, ident in idents:
        if "__" in ident:
            diags.append(f"{kind} name {ident} must not contain '__'")
        if ident in KEYWORDS:
            diags.append(f"{kind} name {ident} is a keyword")
    if len(set(prog.events)) != len(prog.events):
        diags.append("duplicate event")

    # junction names: unique program-wide and distinct from state names
    all_junctions = [j for _, j in idents if _ == "junction"]
    for j in sorted(set(all_junctions)):
        if all_junctions.count(j) > 1:
            diags.append(f"duplicate junction {j}")
        if j in state_names:
            diags.append(f"junction {j} collides with a state name")

    if not prog.root.states:
        diags.append("root composition has no states")

    def check_actions(where, actions):
        for a in actions:
            s = var_sort(a.var)
            if s is None:
                diags.append(f"{where}: undeclared variable {a.var}")
                continue
            try:
                es = sort_of(a.expr, var_sort)
            except TypeError as exc:
                diags.append(f"{where}: {exc}")
                continue
            if es != s:
                diags.append(f"{where}: assigning {es} to {s} variable {a.var}")

    for path, sd in prog.states():
        for label in ("entry", "during", "exit"):
            check_actions(_where(path, label), getattr(sd, label))

    for where, scope, ts in _lists(prog):
        junctions = prog.junction_scope(scope)
        for t in ts:
            if t.event is not None and t.event not in events:
                diags.append(f"{where}: undeclared event {t.event}")
            try:
                if sort_of(t.cond, var_sort) != BOOL:
                    diags.append(f"{where}: condition is not boolean")
            except TypeError as exc:
                diags.append(f"{where}: {exc}")
            check_actions(where, t.cond_action)
            check_actions(where, t.trans_action)
            if t.dest != END and t.dest not in junctions and t.dest_path not in paths:
                diags.append(f"{where}: unresolved destination {t.dest}")

    # acyclic junction networks, one graph per scope
    scopes = [((), dict(prog.junctions))] + [(p, dict(sd.junctions)) for p, sd in prog.states()]
    for scope, junctions in scopes:
        state = {}

        def visit(j, stack):
            state[j] = "open"
            for t in junctions[j]:
                if t.dest in junctions:
                    if state.get(t.dest) == "open":
                        cycle = stack[stack.index(t.dest):] + [t.dest] if t.dest in stack else [j, t.dest]
                        diags.append(f"cyclic junction network ({' -> '.join(cycle)})")
                    elif t.dest not in state:
                        visit(t.dest, stack + [t.dest])
            state[j] = "done"

        for j in junctions:
            if j not in state:
                visit(j, [j])
    if any(d.startswith("cyclic") for d in diags):
        return diags  # the checks below walk junction chains

    def check_or(path: Path, comp: Or):
        where = _where(path, "default")
        if not comp.states:
            if comp.default:
                diags.append(f"{where}: default transitions without substates")
            return
        if not _total(prog, path, comp.default):
            diags.append(f"{where}: default transitions may fail to fire "
                         "(the last one must be unguarded, event-free and reach a state)")
        if _may_end(prog, path, comp.default):
            diags.append(f"{where}: default transitions may stop at a terminal junction")
        for d in final_destinations(prog, path, comp.default):
            if d == END or not _inside(tuple(d.split(".")), path):
                diags.append(f"{where}: default destination {d} is outside the composition")

    def subtree_dests(path: Path, sd: StateDef) -> set[str]:
        out = final_destinations(prog, path, sd.inner)
        if isinstance(sd.comp, Or):
            out |= final_destinations(prog, path, sd.comp.default)
        for name, child in sd.comp.states:
            out |= final_destinations(prog, path, child.outer)
            out |= subtree_dests(path + (name,), child)
        return out

    if isinstance(prog.root, Or):
        check_or((), prog.root)
    elif not prog.root.states:
        diags.append("empty parallel composition at <root>")
    for path, sd in prog.states():
        if isinstance(sd.comp, Or):
            check_or(path, sd.comp)
            continue
        if not sd.comp.states:
            diags.append(f"{_where(path, 'and')}: empty parallel composition")
        for d in final_destinations(prog, path, sd.inner):
            if d != END:
                diags.append(f"{_where(path, 'inner')}: inner transition of a parallel "
                             f"state fires to {d}")
    for path, comp in [((), prog.root)] + [(p, sd.comp) for p, sd in prog.states()]:
        if not isinstance(comp, And):
            continue
        for name, child in comp.states:
            cpath = path + (name,)
            if child.outer:
                diags.append(f"{_where(cpath, 'outer')}: parallel substate has outer transitions")
            for d in subtree_dests(cpath, child):
                if d != END and not _inside(tuple(d.split(".")), cpath):
                    diags.append(f"{_where(cpath, 'subtree')}: transition leaves parallel "
                                 f"substate (destination {d})")
    return diags
