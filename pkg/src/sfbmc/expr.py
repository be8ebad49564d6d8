"""Expression trees shared by conditions, actions, properties and symbolic values.

Program-level expressions mention variables (``Var``).  Symbolic values are
the same trees over ``Sym`` leaves, where ``Sym(v)`` stands for the initial
symbol bound to program variable ``v``.  Properties may additionally use
``In(path)`` atoms that test whether a state is active.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

INT = "int"
BOOL = "bool"

ARITH_OPS = ("+", "-", "*")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("&&", "||")


@dataclass(frozen=True)
class Const:
    value: Union[int, bool]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class In:
    path: tuple[str, ...]


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Sym, In, Unary, Binary]

TRUE = Const(True)
FALSE = Const(False)


class EvalError(Exception):
    """Raised when an expression cannot be evaluated (unbound name, bad sort)."""


def is_bool_const(e: Expr, value: bool) -> bool:
    return isinstance(e, Const) and isinstance(e.value, bool) and e.value is value


def neg(e: Expr) -> Expr:
    return Unary("!", e)


def conj(parts) -> Expr:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = Binary("&&", out, p)
    return out


def disj(parts) -> Expr:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Binary("||", out, p)
    return out


# -- evaluation -------------------------------------------------------------

def _apply(op: str, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "&&":
        return a and b
    if op == "||":
        return a or b
    raise EvalError(f"unknown operator {op!r}")


def evaluate(e: Expr, var: Callable[[str], object] | None = None,
             sym: Callable[[str], object] | None = None,
             active: Callable[[tuple[str, ...]], bool] | None = None):
    """Evaluate ``e`` with lookup callbacks for variables, symbols and ``in`` atoms."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        if var is None:
            raise EvalError(f"unbound variable {e.name}")
        return var(e.name)
    if isinstance(e, Sym):
        if sym is None:
            raise EvalError(f"unbound symbol {e.name}")
        return sym(e.name)
    if isinstance(e, In):
        if active is None:
            raise EvalError("in(...) outside a property")
        return active(e.path)
    if isinstance(e, Unary):
        v = evaluate(e.arg, var, sym, active)
        return (not v) if e.op == "!" else -v
    if isinstance(e, Binary):
        # short-circuit keeps evaluation total on guarded sub-terms
        if e.op == "&&":
            return bool(evaluate(e.left, var, sym, active)) and bool(evaluate(e.right, var, sym, active))
        if e.op == "||":
            return bool(evaluate(e.left, var, sym, active)) or bool(evaluate(e.right, var, sym, active))
        return _apply(e.op, evaluate(e.left, var, sym, active), evaluate(e.right, var, sym, active))
    raise EvalError(f"not an expression: {e!r}")


def eval_in_env(e: Expr, env: Mapping[str, object]):
    """Evaluate a program expression against a concrete environment."""
    def lookup(name):
        try:
            return env[name]
        except KeyError:
            raise EvalError(f"unbound variable {name}") from None
    return evaluate(e, var=lookup)


# -- structural operations ------------------------------------------------

def substitute(e: Expr, var: Callable[[str], Expr] | None = None,
               sym: Callable[[str], Expr] | None = None) -> Expr:
    """Replace ``Var``/``Sym`` leaves; unchanged subtrees are shared."""
    if isinstance(e, Var):
        return var(e.name) if var else e
    if isinstance(e, Sym):
        return sym(e.name) if sym else e
    if isinstance(e, Unary):
        arg = substitute(e.arg, var, sym)
        return e if arg is e.arg else Unary(e.op, arg)
    if isinstance(e, Binary):
        left = substitute(e.left, var, sym)
        right = substitute(e.right, var, sym)
        if left is e.left and right is e.right:
            return e
        return Binary(e.op, left, right)
    return e


def fold(e: Expr) -> Expr:
    """Constant folding: evaluate ground subterms and drop boolean units.

    Non-ground arithmetic is left alone, so ``x + 0`` stays as written.
    """
    if isinstance(e, Unary):
        arg = fold(e.arg)
        if isinstance(arg, Const):
            return Const(not arg.value) if e.op == "!" else Const(-arg.value)
        return e if arg is e.arg else Unary(e.op, arg)
    if isinstance(e, Binary):
        left, right = fold(e.left), fold(e.right)
        if e.op in BOOL_OPS:
            absorbing = e.op == "||"  # true absorbs ||, false absorbs &&
            for a, b in ((left, right), (right, left)):
                if is_bool_const(a, absorbing):
                    return Const(absorbing)
                if is_bool_const(a, not absorbing):
                    return b
        elif isinstance(left, Const) and isinstance(right, Const):
            return Const(_apply(e.op, left.value, right.value))
        if left is e.left and right is e.right:
            return e
        return Binary(e.op, left, right)
    return e


def names(e: Expr, kind=Var) -> set[str]:
    """Names of all ``Var`` (or ``Sym``) leaves."""
    out: set[str] = set()

    def walk(x):
        if isinstance(x, kind) and not isinstance(x, In):
            out.add(x.name)
        elif isinstance(x, Unary):
            walk(x.arg)
        elif isinstance(x, Binary):
            walk(x.left)
            walk(x.right)
    walk(e)
    return out


def in_paths(e: Expr) -> set[tuple[str, ...]]:
    out: set[tuple[str, ...]] = set()

    def walk(x):
        if isinstance(x, In):
            out.add(x.path)
        elif isinstance(x, Unary):
            walk(x.arg)
        elif isinstance(x, Binary):
            walk(x.left)
            walk(x.right)
    walk(e)
    return out


def is_nonlinear(e: Expr) -> bool:
    if isinstance(e, Unary):
        return is_nonlinear(e.arg)
    if isinstance(e, Binary):
        if e.op == "*" and not isinstance(fold(e.left), Const) and not isinstance(fold(e.right), Const):
            return True
        return is_nonlinear(e.left) or is_nonlinear(e.right)
    return False


def sort_of(e: Expr, var_sort: Callable[[str], str | None]) -> str:
    """Infer the sort of ``e``; raise ``TypeError`` with a readable message."""
    if isinstance(e, Const):
        return BOOL if isinstance(e.value, bool) else INT
    if isinstance(e, (Var, Sym)):
        s = var_sort(e.name)
        if s is None:
            raise TypeError(f"undeclared variable {e.name}")
        return s
    if isinstance(e, In):
        return BOOL
    if isinstance(e, Unary):
        s = sort_of(e.arg, var_sort)
        want = BOOL if e.op == "!" else INT
        if s != want:
            raise TypeError(f"operator {e.op} expects {want}, got {s}")
        return want
    if isinstance(e, Binary):
        ls, rs = sort_of(e.left, var_sort), sort_of(e.right, var_sort)
        if e.op in ARITH_OPS:
            if ls != INT or rs != INT:
                raise TypeError(f"operator {e.op} expects int operands")
            return INT
        if e.op in ("==", "!="):
            if ls != rs:
                raise TypeError(f"operator {e.op} compares {ls} with {rs}")
            return BOOL
        if e.op in CMP_OPS:
            if ls != INT or rs != INT:
                raise TypeError(f"operator {e.op} expects int operands")
            return BOOL
        if ls != BOOL or rs != BOOL:
            raise TypeError(f"operator {e.op} expects bool operands")
        return BOOL
    raise TypeError(f"not an expression: {e!r}")


# -- rendering --------------------------------------------------------------

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
         "+": 4, "-": 4, "*": 5}


def render(e: Expr, sym_fmt: Callable[[str], str] = lambda n: f"g({n})") -> str:
    """Source-syntax rendering with minimal parentheses."""

    def go(x, ctx: int) -> str:
        if isinstance(x, Const):
            if isinstance(x.value, bool):
                return "true" if x.value else "false"
            return str(x.value) if x.value >= 0 or ctx < 6 else f"({x.value})"
        if isinstance(x, Var):
            return x.name
        if isinstance(x, Sym):
            return sym_fmt(x.name)
        if isinstance(x, In):
            return f"in({'.'.join(x.path)})"
        if isinstance(x, Unary):
            if x.op == "-" and isinstance(x.arg, Const) and not isinstance(x.arg.value, bool):
                # keep "-(3)" distinct from the literal -3
                return f"-({x.arg.value})"
            return f"{x.op}{go(x.arg, 6)}"
        p = _PREC[x.op]
        # left-assoc for arithmetic and booleans; comparisons never chain
        lp = p + 1 if p == 3 else p
        text = f"{go(x.left, lp)} {x.op} {go(x.right, p + 1)}"
        return f"({text})" if p < ctx else text

    return go(e, 0)


def to_smt(e: Expr, name_of: Callable[[Expr], str]) -> str:
    """SMT-LIB rendering; ``name_of`` maps Var/Sym/In leaves to symbols."""
    if isinstance(e, Const):
        if isinstance(e.value, bool):
            return "true" if e.value else "false"
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if isinstance(e, (Var, Sym, In)):
        return name_of(e)
    if isinstance(e, Unary):
        op = "not" if e.op == "!" else "-"
        return f"({op} {to_smt(e.arg, name_of)})"
    a, b = to_smt(e.left, name_of), to_smt(e.right, name_of)
    if e.op == "!=":
        return f"(not (= {a} {b}))"
    op = {"==": "=", "&&": "and", "||": "or"}.get(e.op, e.op)
    return f"({op} {a} {b})"
