"""Counterexample traces decoded from solver models, and their concrete replay."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .concrete import holds, run_trace
from .smtlib import ctrl_name, data_name, event_name
from .syntax import InvariantProperty, Program, format_control_point, path_str


@dataclass
class CexStep:
    index: int
    event: Optional[str]   # event consumed to reach this step (None for steps 0 and 1)
    env: dict
    active: frozenset

    def to_json(self) -> dict:
        return {"step": self.index, "event": self.event,
                "activeStates": sorted(path_str(p) for p in self.active),
                "vars": dict(self.env)}


@dataclass
class Counterexample:
    """Step 0 is the uninitialized configuration, step 1 the initialized one."""
    program: str
    prop: str
    steps: list[CexStep]
    violated_at: int

    @property
    def depth(self) -> int:
        return len(self.steps) - 1

    @property
    def events(self) -> list[str]:
        return [s.event for s in self.steps[2:]]

    def to_json(self) -> dict:
        return {"program": self.program, "property": self.prop, "depth": self.depth,
                "violatedAtStep": self.violated_at, "events": self.events,
                "steps": [s.to_json() for s in self.steps]}

    def format(self) -> str:
        lines = []
        for s in self.steps:
            ev = s.event or ("(init)" if s.index == 1 else "-")
            vals = " ".join(f"{k}={v}" for k, v in s.env.items())
            mark = "  <-- violated" if s.index == self.violated_at else ""
            lines.append(f"  step {s.index:>3}  {ev:<8} {format_control_point(s.active)}  {vals}{mark}")
        return "\n".join(lines)


def extract_counterexample(model: Mapping, sts, prop: InvariantProperty, k: int) -> Counterexample:
    """Decode per-step data, control point and event from a satisfying model."""
    steps = []
    for i in range(k + 1):
        env = {v.name: model[data_name(v.name, i)] for v in sts.data_vars}
        active = frozenset(p for p in sts.control_vars if model.get(ctrl_name(p, i)))
        event = None
        if i >= 2:
            chosen = [e for e in sts.events if model.get(event_name(e, i - 1))]
            event = chosen[0] if chosen else None
        steps.append(CexStep(i, event, env, active))
    violated = next((s.index for s in steps if not holds(prop.expr, s.active, s.env)), k)
    return Counterexample(sts.program.name, prop.text, steps, violated)


@dataclass
class ReplayResult:
    ok: bool
    divergence: str = ""
    diff: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def replay_validate(ce: Counterexample, prog: Program, prop: InvariantProperty) -> ReplayResult:
    """Re-run the event sequence concretely and compare every step."""
    first = ce.steps[0]
    if first.active or first.env != prog.initial_env():
        return ReplayResult(False, "step 0 is not the initial configuration",
                            {"step": 0, "expected": prog.initial_env(), "got": first.env})
    expected = [(frozenset(), prog.initial_env())]
    if ce.depth >= 1:
        try:
            trace = run_trace(prog, ce.events)
        except ValueError as exc:
            return ReplayResult(False, str(exc))
        expected += [(t.active, t.env) for t in trace]
    for s in ce.steps:
        active, env = expected[s.index]
        if s.active != active or s.env != env:
            diff = {k: (env.get(k), s.env.get(k)) for k in env if env.get(k) != s.env.get(k)}
            if s.active != active:
                diff["activeStates"] = (format_control_point(active), format_control_point(s.active))
            return ReplayResult(False, f"first divergence at step {s.index}", {"step": s.index, **diff})
    bad = ce.steps[ce.violated_at]
    if holds(prop.expr, bad.active, bad.env):
        return ReplayResult(False, f"property holds at reported step {ce.violated_at}")
    return ReplayResult(True)
