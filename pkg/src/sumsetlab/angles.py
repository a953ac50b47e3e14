"""Pinned angles of Cartesian products ``A × A``.

With the pin at the origin and ``A`` positive, every point ``(x, y)`` has
direction ``arctan(y/x)`` and the angles are the positive differences of
those directions.  Since ``arctan(e^(u - v)) = arctan(y/x)`` for
``u = log y``, ``v = log x``, the direction set is the image of
``log A - log A`` under ``arctan(exp(x))``; ``angle_reduction_check``
verifies that identity numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

from .errors import DomainError, PreconditionViolated
from .funcdsl import image, parse
from .scalars import DEFAULT_PRECISION, MIN_PRECISION, format_scalar, to_mpf
from .sets import FLOAT, FiniteSet, SignedSumSpec, sumset

ARCTAN_EXP = "arctan(exp(x))"


def _angle_tolerance(precision_bits: int):
    # 2^(-prec/2): the dedup tolerance of a FLOAT set at this precision
    return mpmath.ldexp(mpmath.mpf(1), -(precision_bits // 2))


@dataclass
class PinnedAngleSet:
    pin: tuple
    source: FiniteSet
    angles: FiniteSet
    direction_count: int
    directions: FiniteSet = field(repr=False)
    tolerance: object = None

    def to_dict(self, digits: int = 25) -> dict:
        return {
            "pin": [format_scalar(c, digits) for c in self.pin],
            "source_size": len(self.source),
            "direction_count": self.direction_count,
            "angle_count": len(self.angles),
            "tolerance": mpmath.nstr(self.tolerance, 6),
            "angles": [format_scalar(v, digits) for v in self.angles],
        }


def _check_tolerance(tolerance):
    if tolerance is not None and tolerance <= 0:
        raise PreconditionViolated("tolerance must be positive: exact equality of "
                                   "transcendental values is meaningless in float mode")


def _require_positive(a: FiniteSet):
    if not len(a):
        raise PreconditionViolated("A must be non-empty")
    if a.min() <= 0:
        bad = 0 if 0 in a else a.min()
        raise DomainError("arctan", bad, "A must lie in (0, oo) with the pin at the origin")


def pinned_angles(a: FiniteSet, precision_bits: int = DEFAULT_PRECISION, tolerance=None,
                  pin=(0, 0)) -> PinnedAngleSet:
    """Angles at ``pin`` subtended by pairs of points of ``A × A``.

    Angles lie in ``(0, π)``; straight angles (only possible for a pin
    inside the hull) are dropped.  Values are deduplicated at
    ``tolerance`` (default ``2^(-precision/2)``).  Only the origin pin is
    validated against the reduction identity.
    """
    if precision_bits < MIN_PRECISION:
        raise PreconditionViolated(f"precision must be at least {MIN_PRECISION} bits")
    _check_tolerance(tolerance)
    prec = precision_bits
    tol = _angle_tolerance(prec) if tolerance is None else to_mpf(tolerance, prec)
    px, py = pin
    origin = px == 0 and py == 0
    if origin:
        _require_positive(a)
    with mpmath.workprec(prec + 16):
        pts = [to_mpf(v, prec + 16) for v in a]
        qx, qy = to_mpf(px, prec + 16), to_mpf(py, prec + 16)
        raw = [mpmath.atan2(y - qy, x - qx) for x in pts for y in pts
               if not (x == qx and y == qy)]
    directions = FiniteSet(raw, mode=FLOAT, precision_bits=prec, dedup_tolerance=tol)
    dirs = list(directions)
    with mpmath.workprec(prec):
        pi = +mpmath.pi
        diffs = []
        for i, lo in enumerate(dirs):
            for hi in dirs[i + 1:]:
                gap = hi - lo
                if gap > pi:
                    gap = 2 * pi - gap
                if tol < gap < pi - tol:
                    diffs.append(gap)
    angles = FiniteSet(diffs, mode=FLOAT, precision_bits=prec, dedup_tolerance=tol)
    return PinnedAngleSet((px, py), a, angles, len(directions), directions, tol)


def _normalized(a: FiniteSet) -> FiniteSet:
    # angles are scale invariant, so A is moved into (0, 1] first
    top = a.max()
    return a if top == 1 else a.affine(1 / top, 0)


def angle_reduction_check(a: FiniteSet, precision_bits: int = DEFAULT_PRECISION,
                          tolerance=None) -> bool:
    """Does ``arctan(exp(log A - log A))`` reproduce the origin directions of ``A × A``?

    Also checks that every positive element of the difference set of that
    image is a pinned angle.  ``A`` is rescaled into ``(0, 1]``.
    """
    if len(a) < 2:
        raise PreconditionViolated("need at least two elements")
    _check_tolerance(tolerance)
    _require_positive(a)
    prec = precision_bits
    tol = mpmath.ldexp(1, -64) if tolerance is None else to_mpf(tolerance, prec)
    unit = _normalized(a)
    pinned = pinned_angles(unit, prec, tol)

    with mpmath.workprec(prec):
        logs = FiniteSet([mpmath.log(to_mpf(v, prec)) for v in unit], mode=FLOAT,
                         precision_bits=prec, dedup_tolerance=tol)
        lhs = image(parse(ARCTAN_EXP), sumset(logs, logs, (1, 1)), prec, dedup_tolerance=tol)
        rhs = list(pinned.directions)
        if len(lhs) != len(rhs):
            return False
        if any(abs(u - v) > tol for u, v in zip(lhs, rhs)):
            return False
        angles = list(pinned.angles)
        diffs = [v for v in sumset(lhs, lhs, (1, 1)) if v > tol]
        return all(_near(angles, v, tol) for v in diffs)


def _near(sorted_vals: list, v, tol) -> bool:
    lo, hi = 0, len(sorted_vals)
    while lo < hi:
        mid = (lo + hi) // 2
        if sorted_vals[mid] < v - tol:
            lo = mid + 1
        else:
            hi = mid
    return lo < len(sorted_vals) and abs(sorted_vals[lo] - v) <= tol


@dataclass(frozen=True)
class AngleGrowthRecord:
    n: int
    spec: str
    angle_count: int
    count: int
    precision_bits: int
    tolerance: str

    def to_dict(self) -> dict:
        return {"n": self.n, "spec": self.spec, "angle_count": self.angle_count,
                "count": self.count, "precision_bits": self.precision_bits,
                "tolerance": self.tolerance}


def angle_growth_report(a: FiniteSet, spec=(2, 1), precision_bits: int = DEFAULT_PRECISION,
                        tolerance=None, cap: int | None = None) -> AngleGrowthRecord:
    """Size of the signed sumset of the origin-pinned angle set of ``A × A``."""
    if not isinstance(spec, SignedSumSpec):
        spec = SignedSumSpec(*spec)
    pinned = pinned_angles(a, precision_bits, tolerance)
    count = len(sumset(pinned.angles, None, spec, cap)) if len(pinned.angles) else 0
    return AngleGrowthRecord(len(a), str(spec), len(pinned.angles), count, precision_bits,
                             mpmath.nstr(pinned.tolerance, 6))


__all__ = ["AngleGrowthRecord", "PinnedAngleSet", "angle_growth_report",
           "angle_reduction_check", "pinned_angles"]
