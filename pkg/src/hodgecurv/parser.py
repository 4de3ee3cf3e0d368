"""Recursive-descent parser for the expression grammar.

::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' signed-int)?
    atom   := number | 'i' | var | 'conj' '(' expr ')' | '(' expr ')'
    var    := 't' positive-int
    number := decimal, optionally suffixed by 'i' (imaginary literal)

Whitespace is ignored. ``a+bi`` is read as the sum of two literals and folds to
a single constant.
"""
from __future__ import annotations

import re

from . import expr as E
from .errors import ParseError, SingularEval

__all__ = ["parse_expr"]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<var>t[1-9]\d*)
  | (?P<conj>conj)
  | (?P<imag>i)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_INT_RE = re.compile(r"\d+")


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _line_col(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line, col = _line_col(text, pos)
            raise ParseError(f"unexpected character {text[pos]!r}", line, col,
                             ("number", "t<n>", "conj", "i", "(", "-"))
        kind = m.lastgroup
        if kind != "ws":
            if kind == "op":
                kind = m.group()
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, expected, tok=None):
        tok = tok or self.tok
        line, col = _line_col(self.text, tok.pos)
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", line, col, expected)

    def take(self, kind):
        if self.tok.kind != kind:
            self.fail((kind,))
        tok = self.tok
        self.i += 1
        return tok

    def parse(self):
        e = self.expr()
        if self.tok.kind != "end":
            self.fail(("+", "-", "*", "/", "end of input"))
        return e

    def expr(self):
        e = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.take(self.tok.kind).kind
            rhs = self.term()
            e = E.add(e, rhs) if op == "+" else E.add(e, E.mul(E.const(-1), rhs))
        return e

    def term(self):
        e = self.factor()
        while self.tok.kind in ("*", "/"):
            op_tok = self.take(self.tok.kind)
            rhs = self.factor()
            if op_tok.kind == "*":
                e = E.mul(e, rhs)
                continue
            try:
                e = E.quot(e, rhs)
            except SingularEval:
                line, col = _line_col(self.text, op_tok.pos)
                raise ParseError("division by constant zero", line, col) from None
        return e

    def factor(self):
        if self.tok.kind == "-":
            self.take("-")
            return E.mul(E.const(-1), self.factor())
        base = self.atom()
        if self.tok.kind == "^":
            hat = self.take("^")
            n = self.signed_int()
            try:
                return E.power(base, n)
            except SingularEval:
                line, col = _line_col(self.text, hat.pos)
                raise ParseError("negative power of constant zero", line, col) from None
        return base

    def signed_int(self):
        sign = 1
        if self.tok.kind in ("-", "+"):
            sign = -1 if self.take(self.tok.kind).kind == "-" else 1
        tok = self.tok
        if tok.kind != "number" or not _INT_RE.fullmatch(tok.text):
            self.fail(("integer exponent", "-"))
        self.i += 1
        return sign * int(tok.text)

    def atom(self):
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            if tok.text.endswith("i"):
                return E.const(complex(0, float(tok.text[:-1])))
            return E.const(float(tok.text))
        if tok.kind == "imag":
            self.i += 1
            return E.const(1j)
        if tok.kind == "var":
            self.i += 1
            return E.coord(int(tok.text[1:]) - 1)
        if tok.kind == "conj":
            self.i += 1
            self.take("(")
            inner = self.expr()
            self.take(")")
            return E.conj(inner)
        if tok.kind == "(":
            self.i += 1
            inner = self.expr()
            self.take(")")
            return inner
        self.fail(("number", "i", "t<n>", "conj", "(", "-"))


def parse_expr(text):
    """Parse ``text`` into an expression tree; raises :class:`ParseError`."""
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text).parse()
