"""Recursive-descent parser for the expression mini-language.

Grammar (``^`` and ``**`` are synonyms, exponents must fold to integers)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom (('^' | '**') unary)?
    atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'
    VAR    := x<i> | u<j> ("'"*) | y<j> ("'"*)
"""
from __future__ import annotations

import re
from fractions import Fraction

from .expr import BUILTINS, Add, Builtin, Const, Div, Expr, Mul, Neg, Pow, Var, simplify

__all__ = ["ExprSyntaxError", "parse_expr"]


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int | None = None, line: int | None = None):
        self.position = position
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"col {position + 1}")
        super().__init__((", ".join(where) + ": " if where else "") + message)


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*'*)"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)
_VAR = re.compile(r"^([xuy])([1-9][0-9]*)('*)$")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            stripped = len(text) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[stripped]!r}", stripped)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value:
            raise ExprSyntaxError(f"expected {value!r}, found {v or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {v!r}", pos)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else Neg(t))
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Expr:
        e = self.unary()
        factors = [e]
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            pos = self.peek()[2]
            rhs = self.unary()
            if op == "*":
                factors.append(rhs)
            else:
                left = factors[0] if len(factors) == 1 else Mul(tuple(factors))
                if isinstance(rhs, Const) and rhs.value == 0:
                    raise ExprSyntaxError("division by literal zero", pos)
                factors = [Div(left, rhs)]
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            pos = self.peek()[2]
            exp = simplify(self.unary())
            if not isinstance(exp, Const) or Fraction(exp.value).denominator != 1:
                raise ExprSyntaxError("exponents must be integer constants", pos)
            return Pow(base, int(exp.value))
        return base

    def atom(self) -> Expr:
        kind, v, pos = self.take()
        if kind == "num":
            return Const(Fraction(v))
        if kind == "name":
            if v in BUILTINS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Builtin(v, arg)
            m = _VAR.match(v)
            if m is None:
                raise ExprSyntaxError(f"unknown name {v!r}", pos)
            order = len(m.group(3))
            if m.group(1) == "x" and order:
                raise ExprSyntaxError("state variables cannot carry derivative marks", pos)
            return Var(m.group(1), int(m.group(2)), order)
        if v == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected token {v or 'end of input'!r}", pos)


def parse_expr(text: str) -> Expr:
    """Parse an expression; the result is the raw tree (call ``simplify`` to canonicalise)."""
    return _Parser(text).parse()
