"""A long-lived SMT solver process driven over SMT-LIB text.

Any solver that reads SMT-LIB 2 from stdin works; the default is
``z3 -in``.  The session turns on ``:print-success`` so every command has
exactly one response, which keeps the protocol in lock step.
"""
from __future__ import annotations

import logging
import os
import queue
import shlex
import shutil
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 60.0


class SolverError(Exception):
    """The solver reported an error or could not be started."""


class SolverTimeout(SolverError):
    """No answer within the time budget; the process has been killed."""


# -- s-expressions ------------------------------------------------------------

SExpr = Union[str, list]


def parse_sexprs(text: str) -> list[SExpr]:
    """Parse SMT-LIB output into nested lists of atom strings."""
    out: list[SExpr] = []
    stack: list[list] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "(":
            stack.append([])
            i += 1
        elif c == ")":
            if not stack:
                raise SolverError(f"unbalanced solver output: {text!r}")
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
            i += 1
        else:
            if c == '"':
                j = i + 1
                while j < n:
                    if text[j] == '"':
                        if j + 1 < n and text[j + 1] == '"':
                            j += 2
                            continue
                        break
                    j += 1
                j += 1
            elif c == "|":
                j = text.index("|", i + 1) + 1
            else:
                j = i
                while j < n and not text[j].isspace() and text[j] not in "()":
                    j += 1
            (stack[-1] if stack else out).append(text[i:j])
            i = j
    if stack:
        raise SolverError("incomplete solver output")
    return out


def _balance(text: str) -> int:
    depth, in_str = 0, False
    for c in text:
        if c == '"':
            in_str = not in_str
        elif not in_str:
            depth += (c == "(") - (c == ")")
    return depth


def sexpr_value(v: SExpr):
    """Decode an Int or Bool model value."""
    if isinstance(v, list):
        if len(v) == 2 and v[0] == "-":
            return -sexpr_value(v[1])
        raise SolverError(f"unsupported model value {v!r}")
    if v == "true":
        return True
    if v == "false":
        return False
    return int(v)


def default_command() -> list[str]:
    env = os.environ.get("SFBMC_SOLVER")
    if env:
        return shlex.split(env)
    return ["z3", "-in"]


def resolve_command(command: Union[None, str, Sequence[str]]) -> list[str]:
    if command is None:
        cmd = default_command()
    elif isinstance(command, str):
        cmd = shlex.split(command)
    else:
        cmd = list(command)
    if shutil.which(cmd[0]) is None:
        raise SolverError(f"solver executable not found: {cmd[0]}")
    if os.path.basename(cmd[0]).startswith("z3") and len(cmd) == 1:
        cmd.append("-in")
    return cmd


def tuning_options(command: Sequence[str]) -> list[str]:
    """Solver-specific options sent at session start.

    z3's legacy arithmetic core is several times faster than the default one
    on deep unrollings with push/pop.
    """
    if os.path.basename(command[0]).startswith("z3"):
        return ["(set-option :smt.arith.solver 2)"]
    return []


@dataclass
class SolverStats:
    checks: int = 0
    seconds: float = 0.0
    commands: int = 0
    per_check: list[float] = field(default_factory=list)


class SolverSession:
    """Incremental session with push/pop.  Use as a context manager."""

    def __init__(self, command=None, timeout: float = DEFAULT_TIMEOUT, transcript=None,
                 tune: bool = True):
        self.command = resolve_command(command)
        self.timeout = timeout
        self.transcript = transcript  # optional file-like receiving every command
        self.stats = SolverStats()
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        try:
            self.proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.STDOUT, text=True, bufsize=1)
        except OSError as exc:
            raise SolverError(f"cannot start solver {self.command[0]}: {exc}") from exc
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self.send("(set-option :print-success true)")
        if tune:
            self.send(*tuning_options(self.command))

    def _pump(self):
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _read_response(self, deadline: Optional[float]) -> SExpr:
        buf = ""
        while True:
            wait = None if deadline is None else max(0.0, deadline - time.monotonic())
            try:
                line = self._lines.get(timeout=wait)
            except queue.Empty:
                self.kill()
                raise SolverTimeout("solver timed out") from None
            if line is None:
                raise SolverError(f"solver exited unexpectedly: {buf.strip()}")
            buf += line
            if buf.strip() and _balance(buf) == 0:
                parsed = parse_sexprs(buf)
                if len(parsed) != 1:
                    raise SolverError(f"unexpected solver output: {buf.strip()}")
                return parsed[0]

    def _check_error(self, resp: SExpr, cmd: str):
        if isinstance(resp, list) and resp and resp[0] == "error":
            msg = resp[1].strip('"') if len(resp) > 1 else ""
            raise SolverError(f"solver error on {cmd[:120]}: {msg}")

    def send(self, *commands: str) -> None:
        """Send commands that answer ``success``; comment lines are skipped."""
        cmds = [c for c in commands if c.strip() and not c.lstrip().startswith(";")]
        if not cmds:
            return
        self._write("\n".join(cmds) + "\n")
        for cmd in cmds:
            resp = self._read_response(time.monotonic() + self.timeout)
            self._check_error(resp, cmd)
            if resp != "success":
                raise SolverError(f"unexpected response to {cmd[:120]}: {resp!r}")
        self.stats.commands += len(cmds)

    def _write(self, text: str):
        if self.transcript is not None:
            self.transcript.write(text)
        try:
            self.proc.stdin.write(text)
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise SolverError("solver pipe closed") from exc

    def _query(self, cmd: str, timeout: Optional[float] = None) -> SExpr:
        self._write(cmd + "\n")
        limit = self.timeout if timeout is None else timeout
        resp = self._read_response(time.monotonic() + limit)
        self._check_error(resp, cmd)
        return resp

    def push(self):
        self.send("(push 1)")

    def pop(self):
        self.send("(pop 1)")

    def assert_(self, formula: str):
        self.send(f"(assert {formula})")

    def check_sat(self, timeout: Optional[float] = None) -> str:
        """Return ``sat``, ``unsat`` or ``unknown``; raise SolverTimeout on timeout."""
        start = time.perf_counter()
        try:
            resp = self._query("(check-sat)", timeout)
        finally:
            spent = time.perf_counter() - start
            self.stats.checks += 1
            self.stats.seconds += spent
            self.stats.per_check.append(spent)
        if resp not in ("sat", "unsat", "unknown"):
            raise SolverError(f"unexpected check-sat answer {resp!r}")
        return resp

    def reason_unknown(self) -> str:
        try:
            resp = self._query("(get-info :reason-unknown)")
        except SolverError:
            return "unknown"
        if isinstance(resp, list) and len(resp) == 2:
            return str(resp[1]).strip('"')
        return str(resp)

    def get_values(self, names: Sequence[str], chunk: int = 500) -> dict:
        out = {}
        for start in range(0, len(names), chunk):
            part = names[start:start + chunk]
            resp = self._query(f"(get-value ({' '.join(part)}))")
            for pair in resp:
                out[pair[0]] = sexpr_value(pair[1])
        return out

    def is_sat(self, formula: str) -> bool:
        """Scoped satisfiability check of one formula over declared constants."""
        self.push()
        try:
            self.assert_(formula)
            answer = self.check_sat()
        finally:
            if self.alive:
                self.pop()
        if answer == "unknown":
            raise SolverError(f"solver returned unknown ({self.reason_unknown()})")
        return answer == "sat"

    @property
    def alive(self) -> bool:
        return self.proc.poll() is None

    def kill(self):
        if self.alive:
            self.proc.kill()
            self.proc.wait()

    def close(self):
        if self.alive:
            try:
                self.proc.stdin.write("(exit)\n")
                self.proc.stdin.flush()
                self.proc.stdin.close()
                self.proc.wait(timeout=5)
            except (OSError, ValueError, subprocess.TimeoutExpired):
                self.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass
class SolverVerdict:
    status: str                 # "sat", "unsat" or "unknown"
    model: dict = field(default_factory=dict)
    reason: str = ""
    seconds: float = 0.0


def solve(script, command=None, timeout: float = DEFAULT_TIMEOUT) -> SolverVerdict:
    """Run a standalone script in a fresh solver process."""
    start = time.perf_counter()
    try:
        session = SolverSession(command, timeout)
    except SolverError as exc:
        return SolverVerdict("unknown", reason=str(exc))
    with session:
        body = [c for c in script.commands if c.strip() != "(check-sat)"]
        try:
            session.send(*body)
            status = session.check_sat()
        except SolverTimeout:
            return SolverVerdict("unknown", reason="timeout", seconds=time.perf_counter() - start)
        except SolverError as exc:
            return SolverVerdict("unknown", reason=str(exc), seconds=time.perf_counter() - start)
        model, reason = {}, ""
        if status == "sat":
            model = session.get_values(script.value_names)
        elif status == "unknown":
            reason = session.reason_unknown()
        return SolverVerdict(status, model, reason, time.perf_counter() - start)
