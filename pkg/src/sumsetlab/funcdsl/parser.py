"""Recursive-descent parser for the function grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ['^' integer]
    atom   := number | 'x' | func '(' expr ')' | '(' expr ')'

Extensions, all conservative: a leading ``-`` negates a factor (folded into
the constant when the factor is a literal), ``^`` accepts a signed integer,
and numbers may be written ``12``, ``1.25`` or ``3/4``.  A fraction literal
must not contain spaces, so ``3/4`` is the constant 3/4 while ``3 / 4`` is a
division node.  Offsets in errors are 1-based columns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ExprSyntaxError, UnknownFunction
from .nodes import FUNCTIONS, Add, Const, Div, Expr, Mul, Pow, Sub, Var

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)

# right after '^' only a bare integer may follow, so "x^2/4" is x^2 over 4
_EXPONENT = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int  # 1-based


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            toks.append(_Tok("end", "", pos + 1))
            return toks
        tail = [t.text for t in toks[-2:]]
        after_caret = tail[-1:] == ["^"] or tail == ["^", "-"]
        m = (_EXPONENT if after_caret else _TOKEN).match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos + 1, text)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"{message}, found {what}", tok.offset, self.text)

    def _accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def _expect(self, op: str):
        if not self._accept(op):
            self._fail(f"expected {op!r}")

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail("unexpected trailing input")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self._accept("+"):
                node = Add(node, self.term())
            elif self._accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            if self._accept("*"):
                node = Mul(node, self.factor())
            elif self._accept("/"):
                node = Div(node, self.factor())
            else:
                return node

    def factor(self) -> Expr:
        if self._accept("-"):
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Mul(Const(Fraction(-1)), inner)
        base = self.atom()
        if self._accept("^"):
            negative = self._accept("-")
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                self._fail("expected integer exponent")
            self.i += 1
            exponent = -int(tok.text) if negative else int(tok.text)
            return Pow(base, exponent)
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(Fraction(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text == "x":
                return Var()
            cls = FUNCTIONS.get(tok.text)
            if cls is None:
                raise UnknownFunction(tok.text, tok.offset)
            self._expect("(")
            arg = self.expr()
            self._expect(")")
            return cls(arg)
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        self._fail("expected number, 'x', function or '('")


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 1, text or "")
    return _Parser(text).parse()
