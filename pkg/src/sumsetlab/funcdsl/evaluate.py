"""Numeric and exact evaluation, images of finite sets, monotone pieces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from ..errors import BadInterval, DomainError, TooManyPieces
from ..scalars import DEFAULT_PRECISION, is_exact, to_fraction, to_mpf
from ..sets import EXACT, FLOAT, FiniteSet
from .calculus import differentiate
from .nodes import (
    Add, Arctan, Const, Cos, Div, Exp, Expr, Log, Mul, Pow, Sin, Sub, Var,
    is_rational_function, render,
)

GUARD_BITS = 32
DEFAULT_SAMPLES = 4096

_KIND = {Add: "add", Sub: "sub", Mul: "mul", Div: "div", Pow: "pow",
         Exp: "exp", Log: "log", Sin: "sin", Cos: "cos", Arctan: "arctan"}

_MP_FUNC = {"exp": mpmath.exp, "sin": mpmath.sin, "cos": mpmath.cos, "arctan": mpmath.atan}
_NP_FUNC = {"exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos, "arctan": np.arctan}


def _short(expr: Expr, limit: int = 60) -> str:
    text = render(expr)
    return text if len(text) <= limit else text[: limit - 3] + "..."


class CompiledFunction:
    """An expression flattened into a straight-line program.

    Shared subtrees (common after differentiation) are evaluated once.
    """

    def __init__(self, expr: Expr):
        self.expr = expr
        self._ops: list[tuple] = []
        slot: dict[int, int] = {}
        stack = [(expr, False)]
        while stack:
            node, ready = stack.pop()
            if id(node) in slot:
                continue
            kids = node.children()
            if not ready and kids:
                stack.append((node, True))
                stack.extend((c, False) for c in reversed(kids) if id(c) not in slot)
                continue
            args = tuple(slot[id(c)] for c in kids)
            if isinstance(node, Const):
                op = ("const", node.value)
            elif isinstance(node, Var):
                op = ("var",)
            elif isinstance(node, Pow):
                op = ("pow", args[0], node.exponent)
            else:
                op = (_KIND[type(node)], *args)
            slot[id(node)] = len(self._ops)
            self._ops.append(op + (node,))

    def __call__(self, x, precision_bits: int = DEFAULT_PRECISION):
        """Value at ``x`` rounded to ``precision_bits``."""
        with mpmath.workprec(precision_bits + GUARD_BITS):
            xv = to_mpf(x, precision_bits + GUARD_BITS)
            vals = []
            for op in self._ops:
                kind = op[0]
                if kind == "const":
                    q = op[1]
                    v = mpmath.mpf(q.numerator) / q.denominator
                elif kind == "var":
                    v = xv
                elif kind == "add":
                    v = vals[op[1]] + vals[op[2]]
                elif kind == "sub":
                    v = vals[op[1]] - vals[op[2]]
                elif kind == "mul":
                    v = vals[op[1]] * vals[op[2]]
                elif kind == "div":
                    den = vals[op[2]]
                    if den == 0:
                        raise DomainError("div", x, f"division by zero in {_short(op[-1])}")
                    v = vals[op[1]] / den
                elif kind == "pow":
                    base, n = vals[op[1]], op[2]
                    if n < 0 and base == 0:
                        raise DomainError("pow", x, f"zero to a negative power in {_short(op[-1])}")
                    v = base ** n
                elif kind == "log":
                    arg = vals[op[1]]
                    if arg <= 0:
                        raise DomainError("log", x, f"non-positive argument {mpmath.nstr(arg, 8)} "
                                                    f"in {_short(op[-1])}")
                    v = mpmath.log(arg)
                else:
                    v = _MP_FUNC[kind](vals[op[1]])
                vals.append(v)
        with mpmath.workprec(precision_bits):
            return +vals[-1]

    def exact(self, x) -> Fraction:
        """Exact value at a rational point; rational functions only."""
        xv = to_fraction(x)
        vals = []
        for op in self._ops:
            kind = op[0]
            if kind == "const":
                v = op[1]
            elif kind == "var":
                v = xv
            elif kind == "add":
                v = vals[op[1]] + vals[op[2]]
            elif kind == "sub":
                v = vals[op[1]] - vals[op[2]]
            elif kind == "mul":
                v = vals[op[1]] * vals[op[2]]
            elif kind == "div":
                if vals[op[2]] == 0:
                    raise DomainError("div", x, f"division by zero in {_short(op[-1])}")
                v = vals[op[1]] / vals[op[2]]
            elif kind == "pow":
                if op[2] < 0 and vals[op[1]] == 0:
                    raise DomainError("pow", x, f"zero to a negative power in {_short(op[-1])}")
                v = vals[op[1]] ** op[2]
            else:
                raise TypeError(f"{kind} has no exact rational evaluation")
            vals.append(v)
        return vals[-1]

    def float64(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised double-precision values; NaN/inf mark trouble spots."""
        xs = np.asarray(xs, dtype=np.float64)
        vals = []
        with np.errstate(all="ignore"):
            for op in self._ops:
                kind = op[0]
                if kind == "const":
                    v = np.full_like(xs, float(op[1]))
                elif kind == "var":
                    v = xs
                elif kind == "add":
                    v = vals[op[1]] + vals[op[2]]
                elif kind == "sub":
                    v = vals[op[1]] - vals[op[2]]
                elif kind == "mul":
                    v = vals[op[1]] * vals[op[2]]
                elif kind == "div":
                    v = vals[op[1]] / vals[op[2]]
                elif kind == "pow":
                    v = vals[op[1]] ** float(op[2])
                elif kind == "log":
                    arg = vals[op[1]]
                    v = np.where(arg > 0, np.log(np.where(arg > 0, arg, 1.0)), np.nan)
                else:
                    v = _NP_FUNC[kind](vals[op[1]])
                vals.append(v)
        return vals[-1]


@lru_cache(maxsize=256)
def compile_function(expr: Expr) -> CompiledFunction:
    return CompiledFunction(expr)


def evaluate(f: Expr, x, precision_bits: int = DEFAULT_PRECISION):
    """``f(x)`` as an mpf correctly rounded up to a few ulps."""
    return compile_function(f)(x, precision_bits)


def evaluate_exact(f: Expr, x) -> Fraction:
    """``f(x)`` exactly, for rational functions and rational ``x``."""
    return compile_function(f).exact(x)


def image(f: Expr, a: FiniteSet, precision_bits: int | None = None,
          dedup_tolerance=None) -> FiniteSet:
    """``{f(a) : a in A}``.

    Exact when ``A`` is exact and ``f`` is a rational function; otherwise a
    float set at ``precision_bits`` (default: the set's own precision).
    """
    fn = compile_function(f)
    if a.mode == EXACT and is_rational_function(f):
        return FiniteSet([fn.exact(v) for v in a], mode=EXACT)
    prec = precision_bits or a.precision_bits or DEFAULT_PRECISION
    tol = dedup_tolerance if dedup_tolerance is not None else (
        a.dedup_tolerance if a.mode == FLOAT and a.precision_bits == prec else None)
    return FiniteSet([fn(v, prec) for v in a], mode=FLOAT, precision_bits=prec,
                     dedup_tolerance=tol)


def _scalar(value):
    if is_exact(value) or isinstance(value, str) and "/" in value:
        return to_fraction(value)
    v = to_mpf(value, DEFAULT_PRECISION * 2)
    if not mpmath.isfinite(v):
        raise BadInterval(f"interval endpoint {value} is not finite")
    return v


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with finite endpoints, ``lo < hi``."""

    lo: object
    hi: object

    def __post_init__(self):
        lo, hi = _scalar(self.lo), _scalar(self.hi)
        if not to_fraction(lo) < to_fraction(hi):
            raise BadInterval(f"need lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """``"lo,hi"`` (brackets optional)."""
        parts = text.strip().strip("[]()").split(",")
        if len(parts) != 2:
            raise BadInterval(f"expected 'lo,hi', got {text!r}")
        return cls(*(p.strip() for p in parts))

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return to_fraction(self.lo) <= to_fraction(x) <= to_fraction(self.hi)

    def grid(self, count: int, precision_bits: int = DEFAULT_PRECISION) -> list:
        """``count`` equally spaced points including both endpoints."""
        with mpmath.workprec(precision_bits):
            lo, hi = to_mpf(self.lo, precision_bits), to_mpf(self.hi, precision_bits)
            step = (hi - lo) / (count - 1)
            pts = [lo + i * step for i in range(count)]
            pts[-1] = hi
        return pts


def _signs(fn: CompiledFunction, pts: list, precision_bits: int) -> list[int]:
    vals = fn.float64([float(p) for p in pts])
    if np.all(np.isfinite(vals)):
        return np.sign(vals).astype(int).tolist()
    # overflow or a domain problem: redo at low precision, raising DomainError
    # if some sample really lies outside the domain
    return [int(mpmath.sign(fn(p, 64))) for p in pts]


def _bisect_root(fn: CompiledFunction, lo, hi, sign_lo: int, precision_bits: int, width):
    with mpmath.workprec(precision_bits):
        for _ in range(4 * precision_bits):
            if hi - lo <= width:
                break
            mid = (lo + hi) / 2
            s = int(mpmath.sign(fn(mid, precision_bits)))
            if s == 0:
                return mid
            if s == sign_lo:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def _sign_change_roots(fn: CompiledFunction, pts: list, precision_bits: int, width) -> list:
    signs = _signs(fn, pts, precision_bits)
    roots = []
    prev = None
    for i, s in enumerate(signs):
        if s == 0:
            continue
        if prev is not None and signs[prev] != s:
            # confirm the bracket at full precision before refining
            s_lo = int(mpmath.sign(fn(pts[prev], precision_bits)))
            s_hi = int(mpmath.sign(fn(pts[i], precision_bits)))
            if s_lo and s_hi and s_lo != s_hi:
                roots.append(_bisect_root(fn, pts[prev], pts[i], s_lo, precision_bits, width))
        prev = i
    return roots


def monotone_partition(f: Expr, interval: Interval, max_pieces: int = 16,
                       precision_bits: int = DEFAULT_PRECISION,
                       samples: int = DEFAULT_SAMPLES) -> list[Interval]:
    """Split ``interval`` where ``f'`` or ``f''`` changes sign.

    Sign changes are located on ``samples`` equally spaced points and then
    refined by bisection to width ``2**(-precision_bits/2)``.  This is a
    sampling heuristic: pairs of roots closer than the sample spacing can
    be missed.
    """
    if samples < 2:
        raise ValueError("samples must be at least 2")
    width = mpmath.ldexp(mpmath.mpf(1), -(precision_bits // 2))
    d1 = differentiate(f)
    d2 = differentiate(d1)
    pts = interval.grid(samples, precision_bits)
    cuts = []
    for g in (d1, d2):
        cuts.extend(_sign_change_roots(compile_function(g), pts, precision_bits, width))
    cuts.sort()
    lo, hi = pts[0], pts[-1]
    bounds = [interval.lo]
    last = lo
    for c in cuts:
        if c - last > width and hi - c > width:
            bounds.append(c)
            last = c
    bounds.append(interval.hi)
    if len(bounds) - 1 > max_pieces:
        raise TooManyPieces(f"{len(bounds) - 1} monotone pieces exceed max_pieces={max_pieces}")
    return [Interval(a, b) for a, b in zip(bounds, bounds[1:])]


def derivative_signs(f: Expr, interval: Interval, order: int = 2,
                     precision_bits: int = DEFAULT_PRECISION, samples: int = 257) -> list[int]:
    """Signs of ``f', ..., f^(order)`` over the interval.

    Each entry is +1 or -1 when that derivative keeps a strict sign on all
    sample points (endpoints included) and 0 otherwise.
    """
    pts = interval.grid(samples, precision_bits)
    out = []
    g = f
    for _ in range(order):
        g = differentiate(g)
        fn = compile_function(g)
        signs = set(_signs(fn, pts, precision_bits))
        if signs in ({1}, {-1}):
            # double-check the endpoints at full precision
            s = signs.pop()
            ends = {int(mpmath.sign(fn(p, precision_bits))) for p in (pts[0], pts[-1])}
            out.append(s if ends == {s} else 0)
        else:
            out.append(0)
    return out
