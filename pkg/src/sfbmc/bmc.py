"""Bounded model checking driver.

For k = 0, 1, ..., kmax the query Î(c0) ∧ ⋀ R̂(ci, ci+1) ∧ ¬φ(ck) is checked.
Depths are visited in order and every earlier depth was Unsat, so checking
only the newest step is equivalent to the disjunction over all steps.
Incremental mode keeps one solver process and wraps each property query
in push/pop; the other mode solves a fresh standalone script per depth.

After depth k is Unsat, φ holds at step k on every path, so incremental
mode asserts φ(ck) permanently.  This keeps the query equisatisfiable and
gives the solver bound atoms for each step, which makes deep unrollings
tractable.
"""
from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Optional

from .counterexample import Counterexample, extract_counterexample, replay_validate
from .smtlib import (declare_step, encode_bmc_query, encode_init, encode_step, event_name,
                     expr_at, header, negated_property, step_names)
from .solver import DEFAULT_TIMEOUT, SolverError, SolverSession, SolverTimeout, solve
from .sts import STS, build_sts
from .syntax import InvariantProperty, Program

log = logging.getLogger(__name__)

BOUNDED_SAFE = "BoundedSafe"
VIOLATED = "Violated"
UNKNOWN = "Unknown"

DEFAULT_KMAX = 50


@dataclass
class DepthResult:
    k: int
    status: str
    seconds: float


@dataclass
class BmcResult:
    verdict: str
    kmax: int
    depth: int                      # violation depth, or deepest depth proven
    counterexample: Optional[Counterexample] = None
    reason: str = ""
    incremental: bool = True
    seconds: float = 0.0
    sts_seconds: float = 0.0
    depths: list[DepthResult] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "kmax": self.kmax, "depth": self.depth,
               "mode": "incremental" if self.incremental else "non-incremental",
               "seconds": round(self.seconds, 3), "stsSeconds": round(self.sts_seconds, 3)}
        if self.reason:
            out["reason"] = self.reason
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
        return out


def infeasibility_pruner(session: SolverSession, sts_vars):
    """Guard predicate for ``build_sts``: keep only satisfiable guards."""
    declared = False

    def feasible(guard) -> bool:
        nonlocal declared
        if not declared:
            session.send(*[f"(declare-const {v.name}__0 {'Int' if v.sort == 'int' else 'Bool'})"
                           for v in sts_vars])
            declared = True
        return session.is_sat(expr_at(guard, 0))
    return feasible


def prepare_sts(prog: Program, prune_infeasible: bool = False, command=None,
                timeout: float = DEFAULT_TIMEOUT) -> STS:
    if not prune_infeasible:
        return build_sts(prog)
    with SolverSession(command, timeout) as session:
        return build_sts(prog, prune=infeasibility_pruner(session, prog.variables))


def _property_assertion(prop, k: int, full_disjunction: bool) -> str:
    if not full_disjunction or k == 0:
        return f"(assert {negated_property(prop, k)})"
    return f"(assert (or {' '.join(negated_property(prop, i) for i in range(k + 1))}))"


def _value_names(sts, k: int) -> list[str]:
    names = [n for i in range(k + 1) for n in step_names(sts, i)]
    return names + [event_name(e, i) for i in range(k) for e in sts.events]


def bmc_check(prog: Program, prop: InvariantProperty, kmax: int = DEFAULT_KMAX,
              command=None, timeout: float = DEFAULT_TIMEOUT, incremental: bool = True,
              full_disjunction: bool = False, emit_smt: Optional[str] = None,
              prune_infeasible: bool = False, sts: Optional[STS] = None) -> BmcResult:
    """Search for a violation of ``prop`` of length at most ``kmax``."""
    start = time.perf_counter()
    try:
        if sts is None:
            sts = prepare_sts(prog, prune_infeasible, command, timeout)
    except SolverError as exc:
        return BmcResult(UNKNOWN, kmax, -1, reason=str(exc), incremental=incremental)
    result = BmcResult(UNKNOWN, kmax, -1, incremental=incremental, sts_seconds=sts.seconds)
    if emit_smt:
        os.makedirs(emit_smt, exist_ok=True)
    try:
        if incremental:
            _run_incremental(sts, prop, kmax, command, timeout, full_disjunction, emit_smt, result)
        else:
            _run_fresh(sts, prop, kmax, command, timeout, emit_smt, result)
    except SolverTimeout:
        result.verdict, result.reason = UNKNOWN, f"solver timeout at depth {result.depth + 1}"
    except SolverError as exc:
        result.verdict, result.reason = UNKNOWN, str(exc)
    if result.counterexample is not None:
        replay = replay_validate(result.counterexample, prog, prop)
        if not replay:
            result.verdict = UNKNOWN
            result.reason = f"counterexample failed concrete replay: {replay.divergence} {replay.diff}"
    result.seconds = time.perf_counter() - start
    return result


def _emit(emit_smt, sts, prop, k):
    if emit_smt:
        path = os.path.join(emit_smt, f"depth_{k:03d}.smt2")
        with open(path, "w") as fh:
            fh.write(encode_bmc_query(sts, prop, k).text)


def _run_incremental(sts, prop, kmax, command, timeout, full_disjunction, emit_smt, result):
    with SolverSession(command, timeout) as session:
        session.send(*header(sts, prop), *declare_step(sts, 0), *encode_init(sts))
        for k in range(kmax + 1):
            if k > 0:
                session.send(*encode_step(sts, k - 1))
            _emit(emit_smt, sts, prop, k)
            session.push()
            session.send(_property_assertion(prop, k, full_disjunction))
            t0 = time.perf_counter()
            status = session.check_sat()
            result.depths.append(DepthResult(k, status, time.perf_counter() - t0))
            log.debug("depth %d: %s", k, status)
            if status == "sat":
                model = session.get_values(_value_names(sts, k))
                result.verdict, result.depth = VIOLATED, k
                result.counterexample = extract_counterexample(model, sts, prop, k)
                return
            if status == "unknown":
                result.verdict, result.reason = UNKNOWN, session.reason_unknown()
                return
            session.pop()
            session.send(f"(assert {expr_at(prop.expr, k)})")
            result.depth = k
        result.verdict = BOUNDED_SAFE


def _run_fresh(sts, prop, kmax, command, timeout, emit_smt, result):
    for k in range(kmax + 1):
        script = encode_bmc_query(sts, prop, k)
        _emit(emit_smt, sts, prop, k)
        verdict = solve(script, command, timeout)
        result.depths.append(DepthResult(k, verdict.status, verdict.seconds))
        if verdict.status == "sat":
            result.verdict, result.depth = VIOLATED, k
            result.counterexample = extract_counterexample(verdict.model, sts, prop, k)
            return
        if verdict.status == "unknown":
            result.verdict, result.reason = UNKNOWN, verdict.reason
            return
        result.depth = k
    result.verdict = BOUNDED_SAFE
