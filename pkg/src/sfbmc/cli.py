"""Command line front end: ``sfbmc check|simulate|derive``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from typing import Optional, Sequence

from .bmc import BOUNDED_SAFE, DEFAULT_KMAX, VIOLATED, bmc_check, prepare_sts
from .concrete import run_trace
from .parser import ModelError, ParseError, load_property_file, parse_model, parse_property
from .semantics import SemanticsError
from .solver import DEFAULT_TIMEOUT, SolverError
from .syntax import Program, format_control_point

EXIT_SAFE, EXIT_VIOLATED, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def bundled_path(name: str) -> Optional[str]:
    """Path of a bundled model or property file, if ``name`` refers to one."""
    root = resources.files("sfbmc") / "models"
    for candidate in (root / name, root / "props" / name):
        if candidate.is_file():
            return str(candidate)
    return None


def _read(path: str, what: str) -> str:
    if not os.path.exists(path):
        bundled = bundled_path(os.path.basename(path))
        if bundled is None:
            raise UsageError(f"{what} not found: {path}")
        path = bundled
    with open(path) as fh:
        return fh.read()


def load_model(path: str) -> Program:
    try:
        return parse_model(_read(path, "model"))
    except ParseError as exc:
        raise UsageError(f"{path}: parse error: {exc}") from None
    except ModelError as exc:
        lines = "\n".join(f"  {d}" for d in exc.diagnostics)
        raise UsageError(f"{path}: invalid model:\n{lines}") from None


def load_property(args, prog: Program):
    if bool(args.prop) == bool(args.prop_file):
        raise UsageError("give exactly one of --prop or --prop-file")
    try:
        if args.prop:
            return parse_property(args.prop, prog)
        return load_property_file(_read(args.prop_file, "property file"), prog)
    except ParseError as exc:
        raise UsageError(f"property: {exc}") from None


def read_events(source: str) -> list[str]:
    """Events from a file (whitespace or comma separated, ``#`` comments) or inline."""
    text = source
    if os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
    words = []
    for line in text.splitlines():
        words += line.split("#", 1)[0].replace(",", " ").split()
    return words


def _emit_derivations(sts, out_dir: str):
    os.makedirs(out_dir, exist_ok=True)
    for t in sts.transitions:
        stem = os.path.join(out_dir, f"T{t.index:02d}")
        with open(stem + ".json", "w") as fh:
            fh.write(t.derivation.dumps(t.event))
        with open(stem + ".txt", "w") as fh:
            fh.write(t.describe() + "\n\n" + t.derivation.render_text(t.event) + "\n")


def _emit_sts(sts, path: str):
    with open(path, "w") as fh:
        fh.write(sts.dumps())


def cmd_derive(args) -> int:
    prog = load_model(args.model)
    try:
        sts = prepare_sts(prog, args.prune_infeasible, args.solver, args.timeout)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    if args.emit_sts:
        _emit_sts(sts, args.emit_sts)
    if args.emit_derivations:
        _emit_derivations(sts, args.emit_derivations)
    if args.json:
        out = sts.to_json()
        out["seconds"] = round(sts.seconds, 3)
        print(json.dumps(out, indent=2))
        return EXIT_SAFE
    print(f"program {prog.name}: {len(sts.control_points)} control points, "
          f"{len(sts.transitions)} transitions ({sts.seconds:.3f}s)")
    print("control points:")
    for cp in sts.control_points:
        print(f"  {format_control_point(cp)}")
    print("transitions:")
    for t in sts.transitions:
        print(f"  {t.describe()}")
    return EXIT_SAFE


def cmd_simulate(args) -> int:
    prog = load_model(args.model)
    events = read_events(args.events) if args.events else []
    try:
        trace = run_trace(prog, events)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except SemanticsError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    for i, step in enumerate(trace):
        print(json.dumps(step.to_json(i)))
    return EXIT_SAFE


def cmd_check(args) -> int:
    prog = load_model(args.model)
    prop = load_property(args, prog)
    if args.kmax < 0:
        raise UsageError("--kmax must be non-negative")
    sts = None
    if args.emit_sts or args.emit_derivations:
        try:
            sts = prepare_sts(prog, args.prune_infeasible, args.solver, args.timeout)
        except SolverError as exc:
            print(f"solver failure: {exc}", file=sys.stderr)
            return EXIT_UNKNOWN
        if args.emit_sts:
            _emit_sts(sts, args.emit_sts)
        if args.emit_derivations:
            _emit_derivations(sts, args.emit_derivations)
    result = bmc_check(prog, prop, args.kmax, command=args.solver, timeout=args.timeout,
                       incremental=not args.no_incremental,
                       full_disjunction=args.full_disjunction, emit_smt=args.emit_smt,
                       prune_infeasible=args.prune_infeasible, sts=sts)
    if args.json:
        print(json.dumps(result.to_json(), indent=2))
    else:
        print(f"property: {prop.text}")
        if result.verdict == VIOLATED:
            ce = result.counterexample
            print(f"Violated at depth {result.depth} ({result.seconds:.2f}s)")
            print(f"events: {' '.join(ce.events) or '(none)'}")
            print(ce.format())
        elif result.verdict == BOUNDED_SAFE:
            print(f"BoundedSafe up to depth {result.kmax} ({result.seconds:.2f}s)")
        else:
            print(f"Unknown after depth {result.depth}: {result.reason}")
    return {VIOLATED: EXIT_VIOLATED, BOUNDED_SAFE: EXIT_SAFE}.get(result.verdict, EXIT_UNKNOWN)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sfbmc", description="Bounded model checking of Stateflow-style programs.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log per-depth progress")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, solver=True):
        p.add_argument("model", help="model file, or the name of a bundled model")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if solver:
            p.add_argument("--solver", help="solver command (default: $SFBMC_SOLVER or 'z3 -in')")
            p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT,
                           help="per-query timeout in seconds")
            p.add_argument("--prune-infeasible", action="store_true",
                           help="drop transitions whose guard is unsatisfiable")
            p.add_argument("--emit-sts", metavar="FILE", help="write the transition system as JSON")
            p.add_argument("--emit-derivations", metavar="DIR",
                           help="write one derivation tree per transition")

    check = sub.add_parser("check", help="check an invariant up to a bound")
    common(check)
    check.add_argument("--prop", help="invariant expression")
    check.add_argument("--prop-file", help="file with one invariant per line (conjoined)")
    check.add_argument("--kmax", type=int, default=DEFAULT_KMAX, help="maximum depth")
    check.add_argument("--emit-smt", metavar="DIR", help="write the query of every depth")
    check.add_argument("--no-incremental", action="store_true",
                       help="solve a standalone script per depth")
    check.add_argument("--full-disjunction", action="store_true",
                       help="assert the violation at any step up to k, not only at k")
    check.set_defaults(func=cmd_check)

    derive = sub.add_parser("derive", help="derive the symbolic transition system")
    common(derive)
    derive.set_defaults(func=cmd_derive)

    simulate = sub.add_parser("simulate", help="run the concrete interpreter")
    common(simulate, solver=False)
    simulate.add_argument("--events", help="event file or comma separated list")
    simulate.set_defaults(func=cmd_simulate)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_SAFE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sfbmc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
