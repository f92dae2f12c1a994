"""Recursive-descent parser for the equation DSL.

Grammar (whitespace insignificant)::

    expression := term (('+' | '-') term)*
    term       := factor (('*' | '/') factor)*
    factor     := '-' factor | atom ('^' ['-'] integer)?
    atom       := integer | symbol | jet | symbol "'"+ | call | '(' expression ')'
    call       := ('exp' | 'log' | 'sqrt' | 'cos' | 'sin' | 'cosh' | 'sinh') '(' expression ')'
    jet        := letter '_' [xt]+

``u_xx`` denotes a partial derivative in x/t and ``u''`` a derivative in the
travelling-wave variable ``xi``.  Error positions are 1-based columns.
"""
from __future__ import annotations

import re
from typing import Iterable

from . import expr as E
from .errors import ParseError, UndeclaredSymbol

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)?)
  | (?P<prime>'+)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)

_JET = re.compile(r"^([A-Za-z][A-Za-z0-9]*)_([xt]+)$")
_CALLS = set(E.FUNCTIONS) | {"exp"}


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, declared: set[str] | None):
        self.toks = tokenize(text)
        self.i = 0
        self.declared = declared

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self, value=None, kind=None):
        k, v, pos = self.tok
        if (value is not None and v != value) or (kind is not None and k != kind):
            want = value or kind
            got = v or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", pos)
        self.i += 1
        return v

    def check_name(self, name: str, pos: int):
        if self.declared is not None and name not in self.declared:
            raise UndeclaredSymbol(f"undeclared symbol {name!r}", pos)

    def expression(self) -> E.Expr:
        terms = [self.term()]
        while self.tok[1] in ("+", "-"):
            op = self.take()
            t = self.term()
            terms.append(t if op == "+" else E.neg(t))
        return E.add(*terms)

    def term(self) -> E.Expr:
        out = self.factor()
        while self.tok[1] in ("*", "/"):
            op = self.take()
            f = self.factor()
            out = E.mul(out, f) if op == "*" else E.mul(out, E.power(f, -1))
        return out

    def factor(self) -> E.Expr:
        if self.tok[1] == "-":
            self.take()
            return E.neg(self.factor())
        base = self.atom()
        if self.tok[1] == "^":
            self.take()
            sign = 1
            if self.tok[1] == "-":
                self.take()
                sign = -1
            k, v, pos = self.tok
            if k != "int":
                raise ParseError(f"expected integer exponent, found {v or 'end of input'!r}", pos)
            self.take()
            return E.power(base, sign * int(v))
        return base

    def atom(self) -> E.Expr:
        k, v, pos = self.tok
        if k == "int":
            self.take()
            return E.Num(int(v))
        if v == "(":
            self.take()
            inner = self.expression()
            self.take(")")
            return inner
        if k == "name":
            self.take()
            if v in _CALLS and self.tok[1] == "(":
                self.take("(")
                arg = self.expression()
                self.take(")")
                return E.exp(arg) if v == "exp" else E.func(v, arg)
            if self.tok[0] == "prime":
                order = len(self.take())
                self.check_name(v, pos)
                return E.deriv(v, (E.XI,) * order)
            jet = _JET.match(v)
            if jet:
                self.check_name(jet.group(1), pos)
                return E.deriv(jet.group(1), tuple(jet.group(2)))
            if "_" in v:
                raise ParseError(f"malformed jet symbol {v!r}", pos)
            self.check_name(v, pos)
            return E.Sym(v)
        raise ParseError(f"unexpected token {v or 'end of input'!r}", pos)


def parse(text: str, declared: Iterable[str] | None = None) -> E.Expr:
    """Parse DSL text into a canonical expression.

    ``declared`` lists the admissible symbol names (function symbols included);
    ``None`` accepts any name.
    """
    p = _Parser(text, None if declared is None else set(declared))
    out = p.expression()
    if p.tok[0] != "end":
        raise ParseError(f"unexpected token {p.tok[1]!r}", p.tok[2])
    return out


def parse_equation(text: str, declared: Iterable[str] | None = None) -> E.Expr:
    """Parse ``lhs = rhs`` (or a bare expression) into ``lhs - rhs``."""
    if text.count("=") > 1:
        raise ParseError("more than one '=' in equation", text.index("=", text.index("=") + 1) + 1)
    if "=" in text:
        lhs, rhs = text.split("=")
        left = parse(lhs, declared)
        try:
            right = parse(rhs, declared)
        except ParseError as exc:
            if exc.position is not None:
                raise type(exc)(str(exc).rsplit(" at offset", 1)[0], exc.position + len(lhs) + 1) from None
            raise
        return E.sub(left, right)
    return parse(text, declared)
