"""Shared test helpers: bundled fixtures, a recording BMC wrapper and a concrete oracle."""
from __future__ import annotations

from collections import deque
from importlib import resources

from sfbmc.bmc import VIOLATED, bmc_check
from sfbmc.concrete import holds, sos_step
from sfbmc.parser import parse_model

# every Violated result produced by the suite, for the extraction-soundness check
VIOLATIONS: list = []
ACCEPTANCE_LINES: list[str] = []


def bundled_text(name: str) -> str:
    return (resources.files("sfbmc") / "models" / name).read_text()


def bundled_model(name: str):
    return parse_model(bundled_text(name))


def run_bmc(prog, prop, *args, **kwargs):
    """``bmc_check`` that remembers every counterexample it returns."""
    result = bmc_check(prog, prop, *args, **kwargs)
    if result.verdict == VIOLATED:
        VIOLATIONS.append((prog, prop, result))
    return result


def record(number: int, title: str, ok: bool, detail: str = "") -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def min_violation_depth(prog, prop_expr, limit: int):
    """Shortest violation by breadth-first search of the concrete interpreter.

    Depth counts configurations the way the BMC unrolling does: 0 is the
    uninitialized configuration, 1 the initialized one, then one per event.
    Returns None if no violation exists within ``limit``.
    """
    start = (frozenset(), tuple(sorted(prog.initial_env().items())))
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        (active, env_items), depth = frontier.popleft()
        env = dict(env_items)
        if not holds(prop_expr, active, env):
            return depth
        if depth == limit:
            continue
        events = [None] if not active else prog.events
        for e in events:
            nxt_active, nxt_env = sos_step(prog, active, env, e)
            key = (nxt_active, tuple(sorted(nxt_env.items())))
            if key not in seen:
                seen.add(key)
                frontier.append((key, depth + 1))
    return None
