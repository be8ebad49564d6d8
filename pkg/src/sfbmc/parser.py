"""Recursive-descent parser for ``.sfi`` chart programs and invariant properties.

Example::

    program Toggle;
    events FLIP;
    var n: int = 0;
    or {
      state Off { outer { on FLIP / { n := n + 1; } -> On; } }
      state On  { outer { on FLIP -> Off; } }
      transitions { -> Off; }
    }
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .expr import BOOL, INT, TRUE, Binary, Const, Expr, In, Unary, Var, in_paths, sort_of
from .syntax import (END, And, Assign, InvariantProperty, Or, Program, StateDef,
                     Transition, VarDecl)


class ParseError(Exception):
    """Syntax error, carrying a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


class ModelError(Exception):
    """A parsed model that fails validation."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(diagnostics))


KEYWORDS = {
    "program", "events", "var", "int", "bool", "or", "and", "state", "entry",
    "during", "exit", "inner", "outer", "junctions", "transitions", "on",
    "end", "true", "false", "in", "skip",
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(?://|\#)[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|:=|==|!=|<=|>=|&&|\|\||[{}\[\]();:,./<>=+\-*!])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str  # "num", "ident", "kw", "op", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind in ("num", "ident", "op"):
            word = m.group()
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, word, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_in: bool = False):
        self.toks = tokenize(text)
        self.i = 0
        self.allow_in = allow_in

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{msg} (found {found!r})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        name = self.tok.text
        self.i += 1
        return name

    # -- program structure
    def program(self) -> Program:
        self.expect("program")
        name = self.ident()
        self.expect(";")
        events: list[str] = []
        if self.accept("events"):
            events.append(self.ident())
            while self.accept(","):
                events.append(self.ident())
            self.expect(";")
        variables = []
        seen = set()
        while self.at("var"):
            tok = self.tok
            decl = self.var_decl()
            if decl.name in seen:
                raise ParseError(f"duplicate variable {decl.name}", tok.line, tok.col)
            seen.add(decl.name)
            variables.append(decl)
        root, junctions = self.component(root=True)
        if self.tok.kind != "eof":
            self.error("expected end of input")
        return Program(name, tuple(events), tuple(variables), root, junctions)

    def var_decl(self) -> VarDecl:
        self.expect("var")
        name = self.ident()
        self.expect(":")
        tok = self.tok
        if self.accept("int"):
            sort = INT
        elif self.accept("bool"):
            sort = BOOL
        else:
            raise ParseError(f"unknown sort {tok.text!r}", tok.line, tok.col)
        self.expect("=")
        vtok = self.tok
        value = self.unary()
        if not isinstance(value, Const) or (sort == BOOL) != isinstance(value.value, bool):
            raise ParseError(f"initial value of {name} must be a {sort} literal", vtok.line, vtok.col)
        self.expect(";")
        return VarDecl(name, sort, value.value)

    def component(self, root: bool = False):
        if self.accept("or"):
            kind = "or"
        elif self.accept("and"):
            kind = "and"
        else:
            self.error("expected 'or' or 'and'")
        self.expect("{")
        states, default, junctions = [], None, None
        names = set()
        while not self.accept("}"):
            if self.at("state"):
                tok = self.toks[self.i + 1]
                name, sd = self.state()
                if name in names:
                    raise ParseError(f"duplicate state name {name}", tok.line, tok.col)
                names.add(name)
                states.append((name, sd))
            elif self.at("transitions") and kind == "or" and default is None:
                self.i += 1
                default = self.transition_block()
            elif self.at("junctions") and root and junctions is None:
                self.i += 1
                junctions = self.junction_block()
            else:
                self.error("expected 'state'" + (", 'transitions'" if kind == "or" else "")
                           + (" or 'junctions'" if root else ""))
        comp = Or(tuple(states), default or ()) if kind == "or" else And(tuple(states))
        return comp, (junctions or ())

    def state(self):
        self.expect("state")
        name = self.ident()
        self.expect("{")
        parts: dict = {}
        while not self.accept("}"):
            tok = self.tok
            key = tok.text if tok.kind == "kw" else None
            if key in parts or (key in ("or", "and") and "comp" in parts):
                self.error(f"duplicate {key!r} section")
            if key in ("entry", "during", "exit"):
                self.i += 1
                self.expect(":")
                parts[key] = self.bare_actions()
            elif key in ("inner", "outer"):
                self.i += 1
                parts[key] = self.transition_block()
            elif key == "junctions":
                self.i += 1
                parts[key] = self.junction_block()
            elif key in ("or", "and"):
                parts["comp"], _ = self.component()
            else:
                self.error("expected a state section")
        return name, StateDef(
            entry=parts.get("entry", ()), during=parts.get("during", ()),
            exit=parts.get("exit", ()), comp=parts.get("comp", Or()),
            inner=parts.get("inner", ()), outer=parts.get("outer", ()),
            junctions=parts.get("junctions", ()),
        )

    def bare_actions(self):
        """Assignments terminated by ';' up to the next section keyword."""
        out = []
        while True:
            if self.accept("skip"):
                self.expect(";")
            elif self.tok.kind == "ident":
                out.append(self.assign())
                self.expect(";")
            else:
                return tuple(out)

    def braced_actions(self):
        self.expect("{")
        out = []
        while not self.accept("}"):
            if self.accept("skip"):
                pass
            else:
                out.append(self.assign())
            if not self.accept(";"):
                self.expect("}")
                break
        return tuple(out)

    def assign(self) -> Assign:
        var = self.ident()
        self.expect(":=")
        return Assign(var, self.expr())

    def transition_block(self):
        self.expect("{")
        out = []
        while not self.accept("}"):
            out.append(self.transition())
        return tuple(out)

    def junction_block(self):
        self.expect("{")
        out = []
        seen = set()
        while not self.accept("}"):
            tok = self.tok
            name = self.ident()
            if name in seen:
                raise ParseError(f"duplicate junction {name}", tok.line, tok.col)
            seen.add(name)
            self.expect(":")
            out.append((name, self.transition_block()))
        return tuple(out)

    def transition(self) -> Transition:
        event = None
        if self.accept("on"):
            event = self.ident()
        cond: Expr = TRUE
        if self.accept("["):
            cond = self.expr()
            self.expect("]")
        cond_action = ()
        if self.accept("/"):
            cond_action = self.braced_actions()
        self.expect("->")
        if self.accept("end"):
            dest = END
        else:
            parts = [self.ident()]
            while self.accept("."):
                parts.append(self.ident())
            dest = ".".join(parts)
        trans_action = ()
        if self.accept("/"):
            trans_action = self.braced_actions()
        self.expect(";")
        return Transition(dest, event, cond, cond_action, trans_action)

    # -- expressions, lowest precedence first
    def expr(self) -> Expr:
        left = self.conjunction()
        while self.accept("||"):
            left = Binary("||", left, self.conjunction())
        return left

    def conjunction(self) -> Expr:
        left = self.comparison()
        while self.accept("&&"):
            left = Binary("&&", left, self.comparison())
        return left

    def comparison(self) -> Expr:
        left = self.additive()
        for op in ("==", "!=", "<=", ">=", "<", ">"):
            if self.accept(op):
                return Binary(op, left, self.additive())
        return left

    def additive(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.accept("*"):
            left = Binary("*", left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.accept("!"):
            return Unary("!", self.unary())
        if self.accept("-"):
            if self.tok.kind == "num":
                return Const(-int(self.num()))
            return Unary("-", self.unary())
        return self.atom()

    def num(self) -> str:
        text = self.tok.text
        self.i += 1
        return text

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            return Const(int(self.num()))
        if self.accept("true"):
            return Const(True)
        if self.accept("false"):
            return Const(False)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.at("in"):
            if not self.allow_in:
                self.error("in(...) is only allowed in properties")
            self.i += 1
            self.expect("(")
            parts = [self.ident()]
            while self.accept("."):
                parts.append(self.ident())
            self.expect(")")
            return In(tuple(parts))
        if tok.kind == "ident":
            self.i += 1
            return Var(tok.text)
        self.error("expected expression")


def parse_model(text: str, validate: bool = True) -> Program:
    """Parse program text; with ``validate`` also reject ill-formed models."""
    prog = _Parser(text).program()
    if validate:
        from .validate import validate_model
        diags = validate_model(prog)
        if diags:
            raise ModelError(diags)
    return prog


def parse_expr(text: str, allow_in: bool = False) -> Expr:
    p = _Parser(text, allow_in=allow_in)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return e


def parse_property(text: str, program: Optional[Program] = None) -> InvariantProperty:
    """Parse an invariant; with ``program`` also check names and sorts."""
    e = parse_expr(text, allow_in=True)
    if program is not None:
        paths = set(program.state_paths())
        for path in sorted(in_paths(e)):
            if path not in paths:
                raise ParseError(f"unknown state {'.'.join(path)} in property")
        try:
            sort = sort_of(e, program.var_sort)
        except TypeError as exc:
            raise ParseError(str(exc)) from None
        if sort != BOOL:
            raise ParseError("property must be boolean")
    return InvariantProperty(e, text.strip())


def load_property_file(text: str, program: Optional[Program] = None) -> InvariantProperty:
    """Non-comment lines of a property file, conjoined."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty property file")
    joined = " && ".join(f"({ln})" for ln in lines) if len(lines) > 1 else lines[0]
    return parse_property(joined, program)
