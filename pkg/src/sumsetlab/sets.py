"""Finite sets of scalars and their iterated signed sumsets.

Exact sets store integer numerators over one common denominator, shifted
so that the smallest element sits at zero; the heavy lifting happens on
those integers in :mod:`sumsetlab._intsum`.  Float sets hold sorted mpf
values merged at a tolerance.
"""

from __future__ import annotations

import bisect
import contextlib
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from . import _intsum
from .errors import BadInterval, InvalidSpec, ModeMismatch, SizeCapExceeded, TooSmall
from .scalars import (
    DEFAULT_PRECISION,
    MIN_PRECISION,
    default_tolerance,
    format_scalar,
    parse_scalar,
    to_fraction,
    to_mpf,
)

EXACT = "exact"
FLOAT = "float"

DEFAULT_SIZE_CAP = 10**8
SIZE_CAP_ENV = "SUMSETLAB_SIZE_CAP"


def default_size_cap() -> int:
    value = os.environ.get(SIZE_CAP_ENV)
    return int(value) if value else DEFAULT_SIZE_CAP


@dataclass(frozen=True)
class SignedSumSpec:
    """Shape ``sA - tB``: ``plus_count`` summands from A, ``minus_count`` from B."""

    plus_count: int
    minus_count: int = 0

    def __post_init__(self):
        s, t = self.plus_count, self.minus_count
        if not (isinstance(s, int) and isinstance(t, int)) or s < 0 or t < 0:
            raise InvalidSpec(f"counts must be non-negative integers, got ({s}, {t})")
        if s + t < 1:
            raise InvalidSpec("spec needs at least one summand")

    @classmethod
    def parse(cls, text: str) -> "SignedSumSpec":
        try:
            s, t = (int(p) for p in text.split(","))
        except ValueError:
            raise InvalidSpec(f"expected 's,t', got {text!r}") from None
        return cls(s, t)

    @classmethod
    def doubling(cls, k: int) -> "SignedSumSpec":
        """The shape ``2^k B - (2^k - 1) B``."""
        return cls(2**k, 2**k - 1)

    def __str__(self):
        return f"{self.plus_count},{self.minus_count}"


class FiniteSet(Sequence):
    """Strictly increasing, duplicate-free finite set of scalars.

    Args:
        values: scalars (ints, Fractions, "p/q" strings, mpf, floats).
        mode: ``"exact"`` or ``"float"``; inferred from the values when
            omitted (any binary float forces float mode).
        precision_bits: float-mode working precision.
        dedup_tolerance: float-mode merge tolerance, default
            ``2**(-precision_bits/2)``.
    """

    __slots__ = ("mode", "precision_bits", "dedup_tolerance",
                 "_den", "_base", "_limbs", "_values")

    def __init__(self, values: Iterable = (), *, mode: str | None = None,
                 precision_bits: int = DEFAULT_PRECISION, dedup_tolerance=None):
        values = list(values)
        if mode is None:
            mode = FLOAT if any(isinstance(v, (float, mpmath.mpf)) for v in values) else EXACT
        if mode == EXACT:
            self._init_exact([to_fraction(v) for v in values])
        elif mode == FLOAT:
            if precision_bits < MIN_PRECISION:
                raise ValueError(f"precision_bits must be >= {MIN_PRECISION}")
            tol = default_tolerance(precision_bits) if dedup_tolerance is None \
                else to_mpf(dedup_tolerance, precision_bits)
            if tol < 0:
                raise ValueError("dedup_tolerance must be non-negative")
            self._init_float([to_mpf(v, precision_bits) for v in values],
                             precision_bits, tol)
        else:
            raise ValueError(f"unknown mode {mode!r}")

    # -- construction -------------------------------------------------

    def _init_exact(self, fracs: list[Fraction]):
        self.mode = EXACT
        self.precision_bits = None
        self.dedup_tolerance = None
        self._values = None
        if not fracs:
            self._den, self._base = 1, 0
            self._limbs = _intsum.from_ints(())
            return
        den = math.lcm(*(f.denominator for f in fracs))
        nums = [f.numerator * (den // f.denominator) for f in fracs]
        base = min(nums)
        self._den, self._base = den, base
        self._limbs = _intsum.from_ints(n - base for n in nums)

    def _init_float(self, vals, precision_bits, tol):
        self.mode = FLOAT
        self.precision_bits = precision_bits
        self.dedup_tolerance = tol
        self._den = self._base = self._limbs = None
        self._values = tuple(_merge_sorted(sorted(vals), tol))

    @classmethod
    def _from_scaled(cls, den: int, base: int, limbs: np.ndarray) -> "FiniteSet":
        """Exact set ``{(base + v) / den}``; ``limbs`` must start at zero."""
        obj = cls.__new__(cls)
        obj.mode = EXACT
        obj.precision_bits = obj.dedup_tolerance = None
        obj._values = None
        if limbs.shape[0] == 1 and limbs.shape[1]:
            g = math.gcd(den, base, int(np.gcd.reduce(limbs[0])))
            if g > 1:
                den //= g
                base //= g
                limbs = limbs // g
                limbs.setflags(write=False)
        obj._den, obj._base, obj._limbs = den, base, limbs
        return obj

    @classmethod
    def _from_sorted_floats(cls, vals, precision_bits, tol) -> "FiniteSet":
        obj = cls.__new__(cls)
        obj.mode = FLOAT
        obj.precision_bits = precision_bits
        obj.dedup_tolerance = tol
        obj._den = obj._base = obj._limbs = None
        obj._values = tuple(vals)
        return obj

    @classmethod
    def empty(cls, mode: str = EXACT, precision_bits: int = DEFAULT_PRECISION) -> "FiniteSet":
        return cls((), mode=mode, precision_bits=precision_bits)

    @classmethod
    def range(cls, start: int, stop: int) -> "FiniteSet":
        """Integers ``start, ..., stop - 1``."""
        return cls._from_scaled(1, start, _intsum.from_ints(range(stop - start)))

    # -- sequence protocol ---------------------------------------------

    def __len__(self) -> int:
        if self.mode == FLOAT:
            return len(self._values)
        return _intsum.size(self._limbs)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        n = len(self)
        if index < 0:
            index += n
        if not 0 <= index < n:
            raise IndexError("FiniteSet index out of range")
        if self.mode == FLOAT:
            return self._values[index]
        return Fraction(self._base + _intsum.value_at(self._limbs, index), self._den)

    def __iter__(self):
        if self.mode == FLOAT:
            return iter(self._values)
        den, base = self._den, self._base
        return (Fraction(base + v, den) for v in _intsum.to_ints(self._limbs))

    def __contains__(self, value) -> bool:
        if len(self) == 0:
            return False
        if self.mode == FLOAT:
            x = to_mpf(value, self.precision_bits)
            with working_precision(self):
                i = bisect.bisect_left(self._values, x - self.dedup_tolerance)
                return i < len(self._values) and abs(self._values[i] - x) <= self.dedup_tolerance
        scaled = to_fraction(value) * self._den - self._base
        if scaled.denominator != 1:
            return False
        v = scaled.numerator
        i = _intsum.searchsorted(self._limbs, v)
        return i < len(self) and _intsum.value_at(self._limbs, i) == v

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSet):
            return NotImplemented
        if self.mode != other.mode or len(self) != len(other):
            return False
        if self.mode == EXACT and self._den == other._den:
            return self._base == other._base and np.array_equal(self._limbs, other._limbs)
        if self.mode == FLOAT:
            tol = max(self.dedup_tolerance, other.dedup_tolerance)
            with mpmath.workprec(max(self.precision_bits, other.precision_bits)):
                return all(abs(a - b) <= tol for a, b in zip(self, other))
        return list(self) == list(other)

    __hash__ = None

    def __repr__(self) -> str:
        n = len(self)
        shown = [format_scalar(v, 12) for v in self[:6]]
        tail = ", ..." if n > 6 else ""
        return f"FiniteSet([{', '.join(shown)}{tail}], mode={self.mode!r}, size={n})"

    # -- accessors -------------------------------------------------------

    def min(self):
        if not len(self):
            raise TooSmall("empty set has no minimum")
        return self[0]

    def max(self):
        if not len(self):
            raise TooSmall("empty set has no maximum")
        return self[-1]

    def elements(self) -> list:
        return list(self)

    def is_integral(self) -> bool:
        return self.mode == EXACT and self._den == 1

    def to_float(self, precision_bits: int = DEFAULT_PRECISION, dedup_tolerance=None) -> "FiniteSet":
        return FiniteSet(list(self), mode=FLOAT, precision_bits=precision_bits,
                         dedup_tolerance=dedup_tolerance)

    def negate(self) -> "FiniteSet":
        """The reflected set ``-A``."""
        if self.mode == FLOAT:
            # mpf negation rounds to the working precision
            with mpmath.workprec(self.precision_bits):
                vals = [-v for v in reversed(self._values)]
            return FiniteSet._from_sorted_floats(vals, self.precision_bits, self.dedup_tolerance)
        if not len(self):
            return self
        top = _intsum.max_value(self._limbs)
        if self._limbs.shape[0] == 1:
            flipped = (top - self._limbs[0][::-1]).reshape(1, -1)
            flipped.setflags(write=False)
        else:
            flipped = _intsum.from_ints(top - v for v in _intsum.to_ints(self._limbs))
        return FiniteSet._from_scaled(self._den, -self._base - top, flipped)

    def affine(self, scale, shift) -> "FiniteSet":
        """``{scale * a + shift}`` for ``scale > 0``."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        if self.mode == FLOAT:
            with mpmath.workprec(self.precision_bits):
                s, c = to_mpf(scale, self.precision_bits), to_mpf(shift, self.precision_bits)
                return FiniteSet._from_sorted_floats(
                    [s * v + c for v in self._values], self.precision_bits, self.dedup_tolerance)
        s, c = to_fraction(scale), to_fraction(shift)
        return FiniteSet([s * v + c for v in self])


def _merge_sorted(vals, tol):
    """Drop values within ``tol`` of the last kept value."""
    out = []
    for v in vals:
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def _check_same_mode(a: FiniteSet, b: FiniteSet):
    if a.mode != b.mode:
        raise ModeMismatch(f"cannot combine {a.mode} set with {b.mode} set")


def _scaled_limbs(s: FiniteSet, factor: int) -> np.ndarray:
    limbs = s._limbs
    if factor == 1:
        return limbs
    top = _intsum.max_value(limbs)
    if limbs.shape[0] == 1 and top * factor < (1 << _intsum.LIMB_BITS):
        out = limbs * factor
        out.setflags(write=False)
        return out
    return _intsum.from_ints(v * factor for v in _intsum.to_ints(limbs))


def add(a: FiniteSet, b: FiniteSet, cap: int | None = None) -> FiniteSet:
    """Minkowski sum ``a + b``."""
    _check_same_mode(a, b)
    cap = default_size_cap() if cap is None else cap
    if a.mode == FLOAT:
        prec = max(a.precision_bits, b.precision_bits)
        tol = max(a.dedup_tolerance, b.dedup_tolerance)
        pairs = len(a) * len(b)
        if pairs > cap:
            raise SizeCapExceeded(pairs, cap)
        with mpmath.workprec(prec):
            sums = sorted(x + y for x in a._values for y in b._values)
        return FiniteSet._from_sorted_floats(_merge_sorted(sums, tol), prec, tol)
    den = math.lcm(a._den, b._den)
    fa, fb = den // a._den, den // b._den
    limbs = _intsum.pair_sum(_scaled_limbs(a, fa), _scaled_limbs(b, fb), cap)
    return FiniteSet._from_scaled(den, a._base * fa + b._base * fb, limbs)


def multiple(a: FiniteSet, count: int, cap: int | None = None) -> FiniteSet:
    """``count``-fold sum ``a + ... + a`` by repeated doubling."""
    if count < 1:
        raise ValueError("count must be positive")
    result = None
    power = a
    while count:
        if count & 1:
            result = power if result is None else add(result, power, cap)
        count >>= 1
        if count:
            power = add(power, power, cap)
    return result


def sumset(a: FiniteSet, b: FiniteSet | None = None, spec: SignedSumSpec | tuple = (2, 1),
           cap: int | None = None) -> FiniteSet:
    """``{x_1 + ... + x_s - y_1 - ... - y_t : x_i in a, y_j in b}``.

    ``b`` defaults to ``a``.  Works by pairwise doubling merges; every merge
    that would enumerate more than ``cap`` pairs raises
    :class:`~sumsetlab.errors.SizeCapExceeded`.
    """
    b = a if b is None else b
    if not isinstance(spec, SignedSumSpec):
        spec = SignedSumSpec(*spec)
    _check_same_mode(a, b)
    if not len(a) or not len(b):
        raise TooSmall("sumset operands must be non-empty")
    s, t = spec.plus_count, spec.minus_count
    plus = multiple(a, s, cap) if s else None
    minus = multiple(b.negate(), t, cap) if t else None
    if plus is None:
        return minus
    if minus is None:
        return plus
    return add(plus, minus, cap)


def doubling_ladder(b: FiniteSet, k_max: int, cap: int | None = None) -> list[FiniteSet]:
    """``[2^k B - (2^k - 1) B for k = 1..k_max]`` sharing intermediate sums."""
    if k_max < 1:
        return []
    out = []
    plus = b                 # 2^j B
    neg_power = b.negate()   # 2^j (-B)
    neg_acc = None           # (2^j - 1)(-B)
    for _ in range(k_max):
        neg_acc = neg_power if neg_acc is None else add(neg_acc, neg_power, cap)
        plus = add(plus, plus, cap)
        out.append(add(plus, neg_acc, cap))
        if len(out) < k_max:
            neg_power = add(neg_power, neg_power, cap)
    return out


def consecutive_differences(a: FiniteSet) -> tuple:
    """``(a_2 - a_1, ..., a_n - a_{n-1})`` in index order."""
    if len(a) < 2:
        raise TooSmall("need at least two elements")
    with working_precision(a):
        return tuple(_differences(list(a)))


def working_precision(a: FiniteSet):
    """Working-precision context for arithmetic on ``a``'s elements."""
    if a.mode == FLOAT:
        return mpmath.workprec(a.precision_bits)
    return contextlib.nullcontext()


def _differences(seq):
    return [y - x for x, y in zip(seq, seq[1:])]


def _strictly_increasing(seq) -> bool:
    return all(x < y for x, y in zip(seq, seq[1:]))


def convexity_order(a: FiniteSet, k_max: int, orientation: str = "convex") -> int:
    """Largest ``k <= min(k_max, |A| - 2)`` with ``A`` k-convex.

    A set is 0-convex when increasing, and k-convex when its consecutive
    difference sequence is (k-1)-convex.  ``orientation="concave"`` applies
    the same test to the reflected set ``-A``.
    """
    if orientation == "concave":
        a = a.negate()
    elif orientation != "convex":
        raise ValueError(f"unknown orientation {orientation!r}")
    seq = list(a)
    limit = min(k_max, len(seq) - 2)
    order = 0
    with working_precision(a):
        for level in range(1, limit + 1):
            seq = _differences(seq)
            if not _strictly_increasing(seq):
                break
            order = level
    return max(0, min(order, k_max))


def interval_count(s: FiniteSet, lo, hi, right_closed: bool = False) -> int:
    """``|S ∩ (lo, hi]|`` if ``right_closed`` else ``|S ∩ (lo, hi)|``.

    In float mode, values within the set's tolerance of an endpoint count as
    equal to that endpoint.
    """
    if s.mode == FLOAT:
        tol = s.dedup_tolerance
        lo, hi = to_mpf(lo, s.precision_bits), to_mpf(hi, s.precision_bits)
        if lo >= hi:
            raise BadInterval(f"empty interval ({lo}, {hi})")
        vals = s._values
        with mpmath.workprec(s.precision_bits):
            left = bisect.bisect_right(vals, lo + tol)
            right = bisect.bisect_right(vals, hi + tol) if right_closed \
                else bisect.bisect_left(vals, hi - tol)
        return max(0, right - left)
    lo, hi = to_fraction(lo), to_fraction(hi)
    if lo >= hi:
        raise BadInterval(f"empty interval ({lo}, {hi})")
    if not len(s):
        return 0
    lo_s = lo * s._den - s._base
    hi_s = hi * s._den - s._base
    # v > lo_s  <=>  v >= floor(lo_s) + 1
    left = _intsum.searchsorted(s._limbs, math.floor(lo_s) + 1)
    if right_closed:
        right = _intsum.searchsorted(s._limbs, math.floor(hi_s), side="right")
    else:
        right = _intsum.searchsorted(s._limbs, math.ceil(hi_s))
    return max(0, right - left)


def n_k_count(b: FiniteSet, k: int, cap: int | None = None) -> int:
    """Elements of ``2^k B - (2^k - 1) B`` strictly between min B and max B."""
    if len(b) < 2:
        raise TooSmall("need at least two elements")
    if k < 1:
        raise ValueError("k must be positive")
    s = sumset(b, b, SignedSumSpec.doubling(k), cap)
    return interval_count(s, b.min(), b.max(), right_closed=False)


def n_k_counts(b: FiniteSet, k_max: int, cap: int | None = None) -> list[int]:
    """``[N_1(B), ..., N_{k_max}(B)]`` using one shared doubling ladder."""
    if len(b) < 2:
        raise TooSmall("need at least two elements")
    lo, hi = b.min(), b.max()
    return [interval_count(s, lo, hi) for s in doubling_ladder(b, k_max, cap)]


# -- set files ----------------------------------------------------------

def read_set(path, mode: str = EXACT, precision_bits: int = DEFAULT_PRECISION,
             dedup_tolerance=None) -> FiniteSet:
    """Read one scalar per line; ``#`` lines and blank lines are skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(parse_scalar(line, exact=(mode == EXACT)))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"{path}:{lineno}: bad scalar {line!r}") from exc
    return FiniteSet(values, mode=mode, precision_bits=precision_bits,
                     dedup_tolerance=dedup_tolerance)


def write_set(path, s: FiniteSet, digits: int = 40) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in s:
            fh.write(format_scalar(v, digits) + "\n")
