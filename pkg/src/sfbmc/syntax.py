"""Abstract syntax of chart programs.

A program is a root composition (``Or`` or ``And``) of named state
definitions.  Activity is not stored in the tree: a configuration pairs a
program with the set of active state paths (see ``ControlPoint``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .expr import TRUE, Expr

Path = tuple[str, ...]
ControlPoint = frozenset  # frozenset[Path]

END = "end"


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


Action = tuple[Assign, ...]  # () is the empty action


@dataclass(frozen=True)
class Transition:
    """``on event [cond] / {cond_action} -> dest / {trans_action}``.

    ``event`` is None when the transition is enabled for any event.  ``dest``
    is a dotted state path, a junction id, or ``end``.
    """
    dest: str
    event: Optional[str] = None
    cond: Expr = TRUE
    cond_action: Action = ()
    trans_action: Action = ()

    @property
    def dest_path(self) -> Path:
        return tuple(self.dest.split("."))


TransitionList = tuple[Transition, ...]
Junctions = tuple[tuple[str, TransitionList], ...]


@dataclass(frozen=True)
class Or:
    states: tuple[tuple[str, "StateDef"], ...] = ()
    default: TransitionList = ()


@dataclass(frozen=True)
class And:
    states: tuple[tuple[str, "StateDef"], ...] = ()


Component = Union[Or, And]


@dataclass(frozen=True)
class StateDef:
    entry: Action = ()
    during: Action = ()
    exit: Action = ()
    comp: Component = field(default_factory=Or)
    inner: TransitionList = ()
    outer: TransitionList = ()
    junctions: Junctions = ()


@dataclass(frozen=True)
class VarDecl:
    name: str
    sort: str
    init: Union[int, bool]


@dataclass(frozen=True)
class Program:
    name: str
    events: tuple[str, ...]
    variables: tuple[VarDecl, ...]
    root: Component
    junctions: Junctions = ()  # junctions visible to the root's transitions

    def var_sort(self, name: str) -> Optional[str]:
        for v in self.variables:
            if v.name == name:
                return v.sort
        return None

    def initial_env(self) -> dict:
        return {v.name: v.init for v in self.variables}

    def states(self) -> Iterator[tuple[Path, StateDef]]:
        """All states in pre-order, with their absolute paths."""
        def walk(comp: Component, prefix: Path):
            for name, sd in comp.states:
                path = prefix + (name,)
                yield path, sd
                yield from walk(sd.comp, path)
        yield from walk(self.root, ())

    def state_paths(self) -> list[Path]:
        return [p for p, _ in self.states()]

    def lookup(self, path: Path) -> StateDef:
        comp = self.root
        sd = None
        for name in path:
            sd = dict(comp.states)[name]
            comp = sd.comp
        if sd is None:
            raise KeyError(path)
        return sd

    def component_at(self, path: Path) -> Component:
        return self.root if not path else self.lookup(path).comp

    def junction_scope(self, path: Path) -> dict[str, TransitionList]:
        """Junctions owned by the state at ``path`` (the program's for the root)."""
        return dict(self.junctions if not path else self.lookup(path).junctions)


@dataclass(frozen=True)
class InvariantProperty:
    """A state predicate over data variables and ``in(path)`` atoms."""
    expr: Expr
    text: str = field(default="", compare=False)


def path_str(path: Path) -> str:
    return ".".join(path)


def format_control_point(cp) -> str:
    if not cp:
        return "{}"
    return "{" + ", ".join(sorted(path_str(p) for p in cp)) + "}"
