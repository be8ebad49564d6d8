"""Differential check of the symbolic semantics against the concrete one.

Along a concrete run from ``env0`` the symbolic successor whose new path
condition conjuncts hold under ``env0`` must be unique, must reach the same
control point, and its substitution interpreted under ``env0`` must equal
the concrete environment.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .concrete import sos_init, sos_step
from .semantics import SemanticsError
from .symbolic import SymbolicEngine, beta, eval_pc, initial_state, ssos_step
from .syntax import Program, format_control_point


@dataclass
class SimulationReport:
    ok: bool
    steps: int = 0
    failed_step: Optional[int] = None
    rule: Optional[str] = None
    message: str = ""

    def __bool__(self):
        return self.ok


def check_simulation(prog: Program, events: Sequence[str], env0: Mapping,
                     engine_cls=SymbolicEngine) -> SimulationReport:
    """Step 0 is initialization; step i > 0 processes ``events[i-1]``."""
    env0 = dict(env0)
    sym = initial_state(prog)
    active, env = frozenset(), dict(env0)
    for step, event in enumerate([None] + list(events)):
        if step == 0:
            active, env = sos_init(prog, env)
        else:
            active, env = sos_step(prog, active, env, event)
        try:
            succs = ssos_step(prog, sym, event, engine_cls)
        except SemanticsError as exc:
            return SimulationReport(False, step, step, None, f"symbolic step failed: {exc}")
        chosen = [s for s in succs if eval_pc(s.conjuncts, env0)]
        if len(chosen) != 1:
            rule = chosen[0].derivation.rule if chosen else None
            return SimulationReport(False, step, step, rule,
                                    f"{len(chosen)} of {len(succs)} successors satisfy the path condition")
        succ = chosen[0]
        if succ.state.active != active:
            return SimulationReport(False, step, step, succ.derivation.rule,
                                    f"control point {format_control_point(succ.state.active)} "
                                    f"!= {format_control_point(active)}")
        values = beta(succ.state.delta, env0)
        if values != env:
            diff = sorted(v for v in env if values.get(v) != env[v])
            return SimulationReport(False, step, step, succ.derivation.rule,
                                    f"data differs on {', '.join(diff)}")
        sym = succ.state
    return SimulationReport(True, len(events) + 1)
