"""Scalar conversions between exact rationals and mpmath binary floats.

Exact scalars are :class:`fractions.Fraction` (always in lowest terms with a
positive denominator).  High-precision scalars are :class:`mpmath.mpf`; the
working precision travels with the containing set or is passed explicitly.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import mpmath

DEFAULT_PRECISION = 128
MIN_PRECISION = 64


def default_tolerance(precision_bits: int):
    """Deduplication tolerance ``2**(-precision/2)`` as an mpf."""
    return mpmath.ldexp(mpmath.mpf(1), -(precision_bits // 2))


def is_exact(value) -> bool:
    return isinstance(value, (int, Rational)) and not isinstance(value, bool)


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, "p/q" / decimal strings, or mpf to a Fraction.

    Binary floats (mpf, float) are converted exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, mpmath.mpf):
        if not mpmath.isfinite(value):
            raise ValueError(f"cannot convert {value} to a rational")
        sign, man, exp, _ = value._mpf_  # man_exp drops the sign
        return Fraction(-int(man) if sign else int(man)) * (Fraction(2) ** exp)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"unsupported scalar type {type(value).__name__}")


def to_mpf(value, precision_bits: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Round ``value`` to an mpf at ``precision_bits``."""
    with mpmath.workprec(precision_bits):
        if isinstance(value, mpmath.mpf):
            return +value
        if isinstance(value, Fraction):
            return mpmath.mpf(value.numerator) / value.denominator
        if isinstance(value, str):
            if "/" in value:
                return to_mpf(Fraction(value), precision_bits)
            return mpmath.mpf(value)
        if isinstance(value, Rational):
            return mpmath.mpf(value.numerator) / value.denominator
        return mpmath.mpf(value)


def parse_scalar(text: str, exact: bool = True):
    """Parse one scalar from the set-file syntax.

    Exact mode accepts an optionally signed integer or ``p/q`` (decimals are
    read exactly too); float mode returns the string unchanged for later
    rounding at the set's precision.
    """
    text = text.strip()
    if exact:
        return Fraction(text)
    # validate early so the error names the bad line
    if "/" in text:
        Fraction(text)
    else:
        mpmath.mpf(text)
    return text


def format_scalar(value, digits: int = 30) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return mpmath.nstr(value, digits)
