"""Recursive-descent parser for the expression grammar.

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | base ('^' uint)?
    base   := uint | ident | func '(' expr ')' | '(' expr ')'

Division is only allowed by constants and parameter monomials, and function
arguments must reduce to a rational linear form in the coordinates with no
constant offset; sums are split into products (exp) or by angle addition.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

from .coefficient import Coefficient
from .errors import OutOfClassError, ParseError
from .expr import NONE, TIME, Expr

FUNCTIONS = ("sin", "cos", "exp")
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")
_COORD = re.compile(r"x([0-9]+)\Z")
_PARAM = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


def check_param_name(name: str) -> str:
    if not _PARAM.match(name) or name in FUNCTIONS or name == TIME or _COORD.match(name):
        raise ParseError(f"invalid parameter name {name!r}")
    return name


def _tokenize(text):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            out.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("ident", m.group(2), start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError("unexpected input", pos, text)
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, n_vars, params):
        self.text = text
        self.n_vars = n_vars
        self.params = set(params)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}", tok[2], self.text)
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.text)

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            tok = self.take()
            rhs = self.factor()
            if tok[1] == "*":
                e = e * rhs
                continue
            c = rhs.as_coefficient()
            if c is None:
                raise ParseError("division is only supported by constants and parameter monomials",
                                 tok[2], self.text)
            if c.is_zero():
                raise ParseError("division by zero", tok[2], self.text)
            e = e.scale(c.inverse())
        return e

    def factor(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return -self.factor()
        if tok[:2] == ("op", "+"):
            self.take()
            return self.factor()
        e = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise ParseError("exponent must be a non-negative integer literal", tok[2], self.text)
            e = e ** int(tok[1])
        return e

    def base(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            return Expr.constant(int(value))
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "ident":
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _apply_function(value, arg, pos, self.text)
            if value == TIME:
                return Expr.var(TIME)
            m = _COORD.match(value)
            if m:
                idx = int(m.group(1))
                if idx < 1 or (self.n_vars is not None and idx > self.n_vars):
                    raise ParseError(f"variable {value} out of range (n = {self.n_vars})", pos, self.text)
                return Expr.var(idx)
            if value in self.params:
                return Expr.constant(Coefficient.param(value))
            raise ParseError(f"unknown identifier {value!r}", pos, self.text)
        if kind == "end":
            raise ParseError("unexpected end of input", pos, self.text)
        raise ParseError(f"unexpected token {value!r}", pos, self.text)


def _linear_parts(arg: Expr):
    """``[(coord_index, rate), ...]`` if ``arg`` is a rational linear form without offset."""
    parts = []
    for (atoms, params), rate in arg.items():
        if params or len(atoms) != 1:
            return None
        ci, p, r, code, _f = atoms[0]
        if p != 1 or r != 0 or code != NONE:
            return None
        parts.append((ci, rate))
    return parts


def _apply_function(name, arg: Expr, pos, text) -> Expr:
    if arg.is_zero():
        return Expr() if name == "sin" else Expr.constant(1)
    parts = _linear_parts(arg)
    if parts is None:
        raise OutOfClassError(
            f"unsupported inhomogeneity: argument of {name}() must be a rational linear combination "
            f"of coordinates, got {arg}", pos, text)
    if name == "exp":
        out = Expr.constant(1)
        for ci, rate in parts:
            out = out * Expr.exp(ci, rate)
        return out
    # angle addition keeps sums of coordinates inside the class
    s, c = Expr(), Expr.constant(1)
    for ci, rate in parts:
        si, co = Expr.trig("sin", ci, rate), Expr.trig("cos", ci, rate)
        s, c = s * co + c * si, c * co - s * si
    return s if name == "sin" else c


def parse(text: str, n_vars: int | None = None, params: Iterable[str] = ()) -> Expr:
    """Parse ``text`` into a canonical :class:`Expr`.

    >>> str(parse("x1^2*x2^10", 2))
    'x1^2*x2^10'
    """
    params = [check_param_name(p) for p in params]
    return _Parser(text, n_vars, params).parse()


def parse_coefficient(text: str, params: Iterable[str] = ()) -> Coefficient:
    """Parse a scalar such as ``3/2``, ``nu`` or ``1/c^2``.

    Identifiers that are not coordinates are taken as parameters.
    """
    names = set(params)
    for m in re.finditer(r"[A-Za-z_][A-Za-z_0-9]*", text):
        word = m.group(0)
        if word not in FUNCTIONS and word != TIME and not _COORD.match(word):
            names.add(word)
    c = parse(text, 0, sorted(names)).as_coefficient()
    if c is None:
        raise ParseError(f"{text!r} is not a rational times a parameter monomial")
    return c


def parse_rational(text: str) -> Fraction:
    c = parse(text, 0, ()).as_coefficient()
    if c is None or c.params:
        raise ParseError(f"{text!r} is not a rational number")
    return c.value
