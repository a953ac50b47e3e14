"""Expression tree for the closed catalog of analytic functions.

Nodes are frozen dataclasses, so trees are immutable, hashable and compare
structurally.  ``render`` produces text that :func:`~sumsetlab.funcdsl.parse`
reads back into an identical tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar


class Expr:
    """Base class; subclasses are frozen dataclasses."""

    __slots__ = ()

    def children(self) -> tuple["Expr", ...]:
        return ()

    def __str__(self):
        return render(self)

    # Building trees in Python code: x**2 + 3*x, etc.
    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __neg__(self):
        return Mul(Const(Fraction(-1)), self)

    def __pow__(self, exponent: int):
        return Pow(self, exponent)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(Fraction(value))


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, slots=True)
class Var(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Binary(Expr):
    left: Expr
    right: Expr
    symbol: ClassVar[str] = "?"

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Add(Binary):
    symbol: ClassVar[str] = "+"


@dataclass(frozen=True, slots=True)
class Sub(Binary):
    symbol: ClassVar[str] = "-"


@dataclass(frozen=True, slots=True)
class Mul(Binary):
    symbol: ClassVar[str] = "*"


@dataclass(frozen=True, slots=True)
class Div(Binary):
    """Partial: undefined where the divisor vanishes."""

    symbol: ClassVar[str] = "/"


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    """Integer powers only; partial when the exponent is negative."""

    base: Expr
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int):
            raise TypeError("Pow exponent must be an integer")

    def children(self):
        return (self.base,)


@dataclass(frozen=True, slots=True)
class Func(Expr):
    arg: Expr
    name: ClassVar[str] = "?"

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Exp(Func):
    name: ClassVar[str] = "exp"


@dataclass(frozen=True, slots=True)
class Log(Func):
    """Natural logarithm; partial (argument must be positive)."""

    name: ClassVar[str] = "log"


@dataclass(frozen=True, slots=True)
class Sin(Func):
    name: ClassVar[str] = "sin"


@dataclass(frozen=True, slots=True)
class Cos(Func):
    name: ClassVar[str] = "cos"


@dataclass(frozen=True, slots=True)
class Arctan(Func):
    name: ClassVar[str] = "arctan"


FUNCTIONS: dict[str, type[Func]] = {cls.name: cls for cls in (Exp, Log, Sin, Cos, Arctan)}

X = Var()


def is_partial(node: Expr) -> bool:
    """Whether this node itself restricts the domain."""
    if isinstance(node, (Div, Log)):
        return True
    return isinstance(node, Pow) and node.exponent < 0


def has_partial(expr: Expr) -> bool:
    return is_partial(expr) or any(has_partial(c) for c in expr.children())


def is_rational_function(expr: Expr) -> bool:
    """True when no transcendental node occurs (exact evaluation possible)."""
    if isinstance(expr, Func):
        return False
    return all(is_rational_function(c) for c in expr.children())


def is_polynomial(expr: Expr) -> bool:
    if isinstance(expr, (Func, Div)):
        return False
    if isinstance(expr, Pow) and expr.exponent < 0:
        return False
    return all(is_polynomial(c) for c in expr.children())


def node_count(expr: Expr) -> int:
    return 1 + sum(node_count(c) for c in expr.children())


def _render_const(value: Fraction) -> str:
    text = str(value.numerator) if value.denominator == 1 \
        else f"{value.numerator}/{value.denominator}"
    if value < 0 or value.denominator != 1:
        return f"({text})"
    return text


def render(expr: Expr) -> str:
    """Fully parenthesised text form; ``parse(render(e)) == e``."""
    if isinstance(expr, Const):
        return _render_const(expr.value)
    if isinstance(expr, Var):
        return "x"
    if isinstance(expr, Binary):
        # spaces around '/' keep "1 / 2" from lexing as the literal 1/2
        op = " / " if isinstance(expr, Div) else expr.symbol
        return f"({render(expr.left)}{op}{render(expr.right)})"
    if isinstance(expr, Pow):
        base = render(expr.base)
        if isinstance(expr.base, Pow):
            base = f"({base})"
        return f"{base}^{expr.exponent}"
    if isinstance(expr, Func):
        return f"{expr.name}({render(expr.arg)})"
    raise TypeError(f"not an expression node: {expr!r}")
