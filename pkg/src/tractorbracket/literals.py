"""Parser for polynomial and form literals.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" atom)*
    atom   := INT ["/" INT] | "x" INT | "dx" INT | "(" expr ")"

``a ^ INT`` with ``a`` a function is a power; every other ``^`` and every
``*`` is the wedge product.  ``2/3*x1^2*dx1^dx3`` is a 2-form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .chartcalc import PolyFn, PolyForm, _sort_sign

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<dx>dx\d+)|(?P<x>x\d+)|(?P<op>[-+*/^()]))")


class LiteralParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col
        self.reason = message


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text[pos:]) - len(text[pos:].lstrip()) + pos
            raise LiteralParseError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


# mixed-degree form: {sorted index tuple: PolyFn}
_Mixed = dict


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise LiteralParseError(msg, self.text, tok.pos)

    def parse(self) -> _Mixed:
        if self.peek().kind == "end":
            self.error("empty expression")
        v = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return v

    def expr(self) -> _Mixed:
        v = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.take().text
            w = self.term()
            v = _add(v, w if op == "+" else _scale(w, -1))
        return v

    def term(self) -> _Mixed:
        v = self.unary()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            v = _wedge(v, self.unary(), self.n)
        return v

    def unary(self) -> _Mixed:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.take()
            return _scale(self.unary(), -1)
        return self.power()

    def power(self) -> _Mixed:
        v = self.atom()
        while self.peek().kind == "op" and self.peek().text == "^":
            caret = self.take()
            nxt = self.peek()
            if nxt.kind == "num":
                self.take()
                if set(v) - {()}:
                    self.error("cannot raise a form of positive degree to a power", caret)
                base = v.get((), PolyFn.zero(self.n))
                v = {(): base ** int(nxt.text)} if int(nxt.text) else {(): PolyFn.constant(self.n, 1)}
                v = {k: f for k, f in v.items() if f}
            else:
                v = _wedge(v, self.atom(), self.n)
        return v

    def atom(self) -> _Mixed:
        tok = self.take()
        if tok.kind == "num":
            value = Fraction(int(tok.text))
            if self.peek().kind == "op" and self.peek().text == "/" :
                self.take()
                den = self.take()
                if den.kind != "num":
                    self.error("expected integer denominator", den)
                if int(den.text) == 0:
                    self.error("zero denominator", den)
                value /= int(den.text)
            return {(): PolyFn.constant(self.n, value)} if value else {}
        if tok.kind == "x":
            i = self._index(tok, tok.text[1:])
            return {(): PolyFn.variable(self.n, i)}
        if tok.kind == "dx":
            i = self._index(tok, tok.text[2:])
            return {(i,): PolyFn.constant(self.n, 1)}
        if tok.kind == "op" and tok.text == "(":
            v = self.expr()
            close = self.take()
            if close.text != ")":
                self.error("expected ')'", close)
            return v
        if tok.kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected {tok.text!r}", tok)

    def _index(self, tok: _Tok, digits: str) -> int:
        i = int(digits)
        if not 1 <= i <= self.n:
            self.error(f"variable index {i} outside 1..{self.n}", tok)
        return i - 1


def _add(a: _Mixed, b: _Mixed) -> _Mixed:
    out = dict(a)
    for k, f in b.items():
        g = out[k] + f if k in out else f
        if g:
            out[k] = g
        else:
            out.pop(k, None)
    return out


def _scale(a: _Mixed, c) -> _Mixed:
    return {k: f * c for k, f in a.items()}


def _wedge(a: _Mixed, b: _Mixed, n: int) -> _Mixed:
    out: _Mixed = {}
    for i1, f1 in a.items():
        for i2, f2 in b.items():
            s = _sort_sign(i1 + i2)
            if not s:
                continue
            out = _add(out, {tuple(sorted(i1 + i2)): f1 * f2 * s})
    return out


def parse_form(text: str, n: int, degree: int | None = None) -> PolyForm:
    """Parse a homogeneous form literal on an n-dimensional chart."""
    mixed = _Parser(text, n).parse()
    degrees = {len(k) for k in mixed}
    if len(degrees) > 1:
        raise LiteralParseError(f"mixed form degrees {sorted(degrees)}", text, 0)
    k = degrees.pop() if degrees else (degree if degree is not None else 0)
    if degree is not None and k != degree:
        raise LiteralParseError(f"expected a {degree}-form, got degree {k}", text, 0)
    return PolyForm(n, k, mixed)


def parse_poly(text: str, n: int) -> PolyFn:
    w = parse_form(text, n, degree=0)
    return w.terms.get((), PolyFn.zero(n))


def format_form(w: PolyForm) -> str:
    return str(w)
