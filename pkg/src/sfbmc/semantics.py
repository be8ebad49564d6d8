"""Pieces shared by the concrete and symbolic step semantics."""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import END, Action, Path


class SemanticsError(Exception):
    """No rule applies (the program left the supported fragment)."""


class DivergenceError(SemanticsError):
    """A single step exceeded its rule-application budget."""


@dataclass(frozen=True)
class Fire:
    dest: Path
    action: Action = ()

    def __str__(self):
        return f"Fire({'.'.join(self.dest)}, {'skip' if not self.action else '...'})"


class _Atom:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    __str__ = __repr__


NO = _Atom("No")
END_TV = _Atom("End")

DEFAULT_RULE_BUDGET = 100_000


def inside(dest: Path, path: Path) -> bool:
    """``dest`` lies strictly below ``path`` (``dest = path.s.rest``)."""
    return len(dest) > len(path) and dest[:len(path)] == path


def enabled(event, current) -> bool:
    """Event-free transitions are enabled for every event."""
    return event is None or event == current


def junction_list(dest: str, junctions: dict):
    """Transition list of a junction destination, or None for a state path."""
    if dest == END:
        return ()
    return junctions.get(dest)


def active_child(comp, path: Path, active) -> str | None:
    for name, _ in comp.states:
        if path + (name,) in active:
            return name
    return None
