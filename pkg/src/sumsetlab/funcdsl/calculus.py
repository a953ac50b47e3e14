"""Symbolic differentiation, substitution and conservative simplification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..errors import InvalidSpec
from ..scalars import to_fraction
from .nodes import (
    Add, Arctan, Const, Cos, Div, Exp, Expr, Func, Log, Mul, Pow, Sin, Sub, Var,
    has_partial, is_polynomial,
)

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))

# Exact values of catalog functions at the only points where they are rational.
_FUNC_AT_CONST = {
    (Exp, Fraction(0)): Fraction(1),
    (Log, Fraction(1)): Fraction(0),
    (Sin, Fraction(0)): Fraction(0),
    (Cos, Fraction(0)): Fraction(1),
    (Arctan, Fraction(0)): Fraction(0),
}


def _is(node: Expr, value) -> bool:
    return isinstance(node, Const) and node.value == value


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    # 0 * e is 0 only where e is defined; keep it when e is partial
    if _is(a, 0) and not has_partial(b):
        return ZERO
    if _is(b, 0) and not has_partial(a):
        return ZERO
    if isinstance(b, Const) and not isinstance(a, Const):
        a, b = b, a
    if isinstance(a, Const) and isinstance(b, Mul) and isinstance(b.left, Const):
        return _mul(Const(a.value * b.left.value), b.right)
    return Mul(a, b)


def _simplify_node(node: Expr) -> Expr:
    if isinstance(node, Add):
        a, b = node.left, node.right
        if isinstance(a, Const) and isinstance(b, Const):
            return Const(a.value + b.value)
        if _is(a, 0):
            return b
        if _is(b, 0):
            return a
        return node
    if isinstance(node, Sub):
        a, b = node.left, node.right
        if isinstance(a, Const) and isinstance(b, Const):
            return Const(a.value - b.value)
        if _is(b, 0):
            return a
        return node
    if isinstance(node, Mul):
        return _mul(node.left, node.right)
    if isinstance(node, Div):
        a, b = node.left, node.right
        if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
            return Const(a.value / b.value)
        if _is(b, 1):
            return a
        return node
    if isinstance(node, Pow):
        base, n = node.base, node.exponent
        if isinstance(base, Const) and not (base.value == 0 and n < 0):
            return Const(base.value ** n)
        if n == 1:
            return base
        if n == 0 and not has_partial(base):
            return ONE
        if isinstance(base, Pow) and (base.exponent > 0 and n > 0):
            return Pow(base.base, base.exponent * n)
        return node
    if isinstance(node, Func) and isinstance(node.arg, Const):
        value = _FUNC_AT_CONST.get((type(node), node.arg.value))
        if value is not None:
            return Const(value)
    return node


def _rebuild(node: Expr, children: list[Expr]) -> Expr:
    if isinstance(node, (Add, Sub, Mul, Div)):
        return type(node)(children[0], children[1])
    if isinstance(node, Pow):
        return Pow(children[0], node.exponent)
    if isinstance(node, Func):
        return type(node)(children[0])
    return node


def simplify(expr: Expr) -> Expr:
    """Constant folding and 0/1 identities, applied bottom-up.

    Never removes a node that restricts the domain: ``0 * (1/x)`` and
    ``x / x`` are left alone.
    """
    kids = expr.children()
    if kids:
        new = [simplify(c) for c in kids]
        if any(n is not c for n, c in zip(new, kids)):
            expr = _rebuild(expr, new)
    return _simplify_node(expr)


def _d(f: Expr) -> Expr:
    if isinstance(f, Const):
        return ZERO
    if isinstance(f, Var):
        return ONE
    if isinstance(f, Add):
        return Add(_d(f.left), _d(f.right))
    if isinstance(f, Sub):
        return Sub(_d(f.left), _d(f.right))
    if isinstance(f, Mul):
        return Add(Mul(_d(f.left), f.right), Mul(f.left, _d(f.right)))
    if isinstance(f, Div):
        u, v = f.left, f.right
        return Div(Sub(Mul(_d(u), v), Mul(u, _d(v))), Pow(v, 2))
    if isinstance(f, Pow):
        n = f.exponent
        if n == 0:
            return ZERO
        return Mul(Mul(Const(Fraction(n)), Pow(f.base, n - 1)), _d(f.base))
    u = f.arg
    du = _d(u)
    if isinstance(f, Exp):
        return Mul(f, du)
    if isinstance(f, Log):
        return Div(du, u)
    if isinstance(f, Sin):
        return Mul(Cos(u), du)
    if isinstance(f, Cos):
        return Mul(Mul(Const(Fraction(-1)), Sin(u)), du)
    if isinstance(f, Arctan):
        return Div(du, Add(ONE, Pow(u, 2)))
    raise TypeError(f"not an expression node: {f!r}")


@lru_cache(maxsize=1024)
def differentiate(f: Expr) -> Expr:
    """Symbolic derivative ``d f / d x``, conservatively simplified."""
    return simplify(_d(f))


def derivative(f: Expr, order: int) -> Expr:
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    for _ in range(order):
        f = differentiate(f)
    return f


def substitute(f: Expr, replacement: Expr) -> Expr:
    """Replace every occurrence of the variable by ``replacement``."""
    if isinstance(f, Var):
        return replacement
    kids = f.children()
    if not kids:
        return f
    return _rebuild(f, [substitute(c, replacement) for c in kids])


@dataclass(frozen=True)
class DiscreteDerivativeSpec:
    """``base(x + shift) - base(x)``; the shift is stored exactly."""

    base: Expr
    shift: Fraction

    def __post_init__(self):
        shift = to_fraction(self.shift)
        if shift <= 0:
            raise InvalidSpec("discrete derivative shift must be positive")
        object.__setattr__(self, "shift", shift)


def discrete_derivative(spec: DiscreteDerivativeSpec | Expr, shift=None) -> Expr:
    """``f(x + d) - f(x)`` with ``d`` folded in as a constant.

    Accepts either a :class:`DiscreteDerivativeSpec` or ``(f, d)``.  For a
    polynomial ``f`` the result is expanded, so ``x^2`` with ``d = 1``
    gives ``2*x + 1``.  Binary
    floats (``mpf``) are converted to the rational they represent exactly.
    """
    if not isinstance(spec, DiscreteDerivativeSpec):
        spec = DiscreteDerivativeSpec(spec, shift)
    shifted = substitute(spec.base, Add(Var(), Const(spec.shift)))
    result = Sub(shifted, spec.base)
    if is_polynomial(spec.base):
        return normalize_polynomial(result)
    return simplify(result)


def polynomial_coefficients(f: Expr) -> list[Fraction]:
    """Coefficients ``[c_0, c_1, ...]`` of a polynomial expression.

    Trailing zeros are stripped (the zero polynomial gives ``[]``).  Raises
    ``ValueError`` when ``f`` is not a polynomial.
    """
    if isinstance(f, Const):
        out = [f.value]
    elif isinstance(f, Var):
        out = [Fraction(0), Fraction(1)]
    elif isinstance(f, (Add, Sub)):
        a, b = polynomial_coefficients(f.left), polynomial_coefficients(f.right)
        sign = 1 if isinstance(f, Add) else -1
        n = max(len(a), len(b))
        a += [Fraction(0)] * (n - len(a))
        b += [Fraction(0)] * (n - len(b))
        out = [x + sign * y for x, y in zip(a, b)]
    elif isinstance(f, Mul):
        out = _poly_mul(polynomial_coefficients(f.left), polynomial_coefficients(f.right))
    elif isinstance(f, Pow) and f.exponent >= 0:
        base = polynomial_coefficients(f.base)
        out = [Fraction(1)]
        for _ in range(f.exponent):
            out = _poly_mul(out, base)
    else:
        raise ValueError(f"not a polynomial: {type(f).__name__} node")
    while out and out[-1] == 0:
        out.pop()
    return out


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * max(0, len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def polynomial(coeffs) -> Expr:
    """Expression for ``sum c_i x^i``, highest degree first."""
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[i])
        if c == 0:
            continue
        mono = ONE if i == 0 else (Var() if i == 1 else Pow(Var(), i))
        terms.append((c, mono, i))
    if not terms:
        return ZERO
    node = None
    for c, mono, i in terms:
        if node is None:
            node = Const(c) if i == 0 else _mul(Const(c), mono)
        elif c > 0:
            node = Add(node, Const(c) if i == 0 else _mul(Const(c), mono))
        else:
            node = Sub(node, Const(-c) if i == 0 else _mul(Const(-c), mono))
    return node


def normalize_polynomial(f: Expr) -> Expr:
    """Canonical expanded form of a polynomial expression (safe: polynomials are total)."""
    return polynomial(polynomial_coefficients(f))
