"""Linear independence of function families.

Three routes, from strongest to weakest evidence:

* exact rank over the rationals when every member is a polynomial;
* a Wronskian sample above a threshold, which certifies independence;
* a least-squares combination that vanishes at every sample, which is
  reported as numeric dependence.

When neither numeric test fires the verdict is inconclusive
(``independent is None``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import DegreeTooLow, EmptyDomain, InvalidSpec, PreconditionViolated
from .funcdsl import (
    Expr, Interval, compile_function, derivative, discrete_derivative, is_polynomial, parse,
    polynomial_coefficients, render,
)
from .scalars import DEFAULT_PRECISION, format_scalar, to_fraction, to_mpf

DEFAULT_SAMPLES = 64

WRONSKIAN = "wronskian"
EXACT_RANK = "exact-rank"
NUMERIC_DEPENDENCE = "numeric-dependence"
INCONCLUSIVE = "inconclusive"


def default_threshold(precision_bits: int):
    return mpmath.ldexp(mpmath.mpf(1), -(precision_bits // 4))


def _as_expr(f) -> Expr:
    return parse(f) if isinstance(f, str) else f


@dataclass(frozen=True)
class FunctionFamily:
    """Functions ``f_1, ..., f_n`` considered on a closed interval."""

    members: tuple
    interval: Interval

    def __post_init__(self):
        members = tuple(_as_expr(f) for f in self.members)
        if not members:
            raise InvalidSpec("a function family needs at least one member")
        object.__setattr__(self, "members", members)
        if not isinstance(self.interval, Interval):
            object.__setattr__(self, "interval", Interval(*self.interval))

    def __len__(self):
        return len(self.members)

    def derivatives(self, k: int) -> "FunctionFamily":
        return FunctionFamily(tuple(derivative(f, k) for f in self.members), self.interval)


@dataclass
class IndependenceVerdict:
    """Outcome of an independence test.

    ``independent`` is ``True``/``False`` when decided and ``None`` when the
    numeric evidence is inconclusive.  ``method`` says which test decided.
    """

    independent: bool | None
    method: str
    samples_used: int = 0
    witness_x: object = None
    wronskian_abs: object = None
    threshold: object = None
    coefficients: tuple | None = None
    residual: object = None
    rank: int | None = None
    minor_determinant: Fraction | None = None
    extra: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.independent)

    def to_dict(self, digits: int = 20) -> dict:
        def fmt(v):
            if v is None:
                return None
            return format_scalar(v, digits)

        out = {
            "independent": self.independent,
            "method": self.method,
            "samples_used": self.samples_used,
            "witness_x": fmt(self.witness_x),
            "wronskian_abs": fmt(self.wronskian_abs),
        }
        if self.threshold is not None:
            out["threshold"] = fmt(self.threshold)
        if self.coefficients is not None:
            out["coefficients"] = [fmt(c) for c in self.coefficients]
        if self.residual is not None:
            out["residual"] = fmt(self.residual)
        if self.rank is not None:
            out["rank"] = self.rank
        if self.minor_determinant is not None:
            out["minor_determinant"] = fmt(self.minor_determinant)
        out.update(self.extra)
        return out


# -- exact linear algebra ---------------------------------------------------------

def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by fraction-exact Gaussian elimination."""
    m = [[to_fraction(v) for v in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank]
        for r in range(rank + 1, len(m)):
            if m[r][col] != 0:
                factor = m[r][col] / p[col]
                m[r] = [a - factor * b for a, b in zip(m[r], p)]
        rank += 1
        if rank == len(m):
            break
    return rank


def exact_det(rows: Sequence[Sequence]) -> Fraction:
    m = [[to_fraction(v) for v in row] for row in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] / m[col][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det


# -- Wronskians ---------------------------------------------------------------------

def chebyshev_points(interval: Interval, count: int, precision_bits: int = DEFAULT_PRECISION):
    """``count`` Chebyshev points of the first kind in ``interval``, ascending."""
    with mpmath.workprec(precision_bits):
        lo, hi = to_mpf(interval.lo, precision_bits), to_mpf(interval.hi, precision_bits)
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        pts = [mid - half * mpmath.cos((2 * j + 1) * mpmath.pi / (2 * count))
               for j in range(count)]
    return pts


def _derivative_table(members: Sequence[Expr]):
    n = len(members)
    return [[compile_function(derivative(f, i)) for f in members] for i in range(n)]


def _float_det(rows) -> mpmath.mpf:
    """Determinant by partial pivoting at the current working precision.

    ``mpmath.det`` can fail on exactly singular input (a zero column), which
    is common here: a zero member gives a zero column.
    """
    m = [list(r) for r in rows]
    n = len(m)
    det = mpmath.mpf(1)
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(m[r][c]))
        if m[p][c] == 0:
            return mpmath.mpf(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            factor = m[r][c] / m[c][c]
            if factor:
                m[r] = [a - factor * b for a, b in zip(m[r], m[c])]
    return det


def _wronskian_at(table, x, precision_bits: int):
    with mpmath.workprec(precision_bits + 32):
        value = _float_det([[fn(x, precision_bits + 32) for fn in row] for row in table])
    with mpmath.workprec(precision_bits):
        return +value


def wronskian(family, x, precision_bits: int = DEFAULT_PRECISION):
    """``det[f_j^(i)(x)]`` for ``i, j = 0..n-1``."""
    members = family.members if isinstance(family, FunctionFamily) else \
        tuple(_as_expr(f) for f in family)
    return _wronskian_at(_derivative_table(members), x, precision_bits)


def _numeric_dependence(members, points, precision_bits, tolerance):
    """Least-squares null vector of the sample matrix, if it really vanishes."""
    fns = [compile_function(f) for f in members]
    with mpmath.workprec(precision_bits):
        g = mpmath.matrix([[fn(x, precision_bits) for fn in fns] for x in points])
        scale = max((abs(g[i, j]) for i in range(g.rows) for j in range(g.cols)),
                    default=mpmath.mpf(0))
        if scale == 0:
            # every member vanishes on every sample
            coeffs = [mpmath.mpf(1)] + [mpmath.mpf(0)] * (len(members) - 1)
            return coeffs, mpmath.mpf(0)
        _, s, v = mpmath.svd_r(g)
        c = [v[v.rows - 1, j] for j in range(v.cols)]
        residual = max(abs(sum(g[i, j] * c[j] for j in range(len(c)))) for i in range(g.rows))
        residual /= scale
    if residual < tolerance:
        return c, residual
    return None, residual


def is_k_independent(family: FunctionFamily, k: int = 0, samples: int = DEFAULT_SAMPLES,
                     precision_bits: int = DEFAULT_PRECISION, threshold=None,
                     tolerance=None) -> IndependenceVerdict:
    """Are the ``k``-th derivatives of the members linearly independent?

    Polynomial families are decided by exact rank.  Otherwise the Wronskian
    is sampled at ``samples`` Chebyshev points; the family is independent
    when some ``|W|`` exceeds ``threshold`` (default
    ``2**(-precision_bits/4)``).  Failing that, a least-squares combination
    with relative residual below ``tolerance`` (same default) at every
    sample is reported as numeric dependence.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if samples < len(family):
        raise ValueError("need at least as many samples as functions")
    threshold = default_threshold(precision_bits) if threshold is None else to_mpf(threshold)
    tolerance = default_threshold(precision_bits) if tolerance is None else to_mpf(tolerance)
    members = family.derivatives(k).members
    points = chebyshev_points(family.interval, samples, precision_bits)

    table = _derivative_table(members)
    best_x, best = None, mpmath.mpf(-1)
    for x in points:
        w = abs(_wronskian_at(table, x, precision_bits))
        if w > best:
            best_x, best = x, w
        if w > threshold and not all(is_polynomial(f) for f in members):
            return IndependenceVerdict(True, WRONSKIAN, samples, x, w, threshold)

    if all(is_polynomial(f) for f in members):
        coeffs = [polynomial_coefficients(f) for f in members]
        width = max((len(c) for c in coeffs), default=0)
        rows = [c + [Fraction(0)] * (width - len(c)) for c in coeffs]
        rank = exact_rank(rows) if width else 0
        return IndependenceVerdict(rank == len(members), EXACT_RANK, samples, best_x, best,
                                   threshold, rank=rank)

    coeffs, residual = _numeric_dependence(members, points, precision_bits, tolerance)
    if coeffs is not None:
        return IndependenceVerdict(False, NUMERIC_DEPENDENCE, samples, best_x, best, threshold,
                                   coefficients=tuple(coeffs), residual=residual)
    return IndependenceVerdict(None, INCONCLUSIVE, samples, best_x, best, threshold,
                               residual=residual)


# -- polynomial discrete derivatives -------------------------------------------------

def polynomial_delta_independence(coefficients: Sequence, shifts: Sequence,
                                  allow_low_degree: bool = False) -> IndependenceVerdict:
    """Exact test for ``{Δ_δ f'}`` with ``f = sum c_i x^i``.

    Builds the ``(m-1) x n`` matrix with rows ``(δ_1^r, ..., δ_n^r)`` for
    ``r = 1..m-1`` and reports independence iff its rank is ``n``.  The
    first ``n`` rows form a scaled Vandermonde matrix whose determinant is
    ``prod δ_i * prod_{i<j} (δ_j - δ_i)``; that value is returned as
    ``minor_determinant`` (``None`` when ``m - 1 < n``).

    ``DegreeTooLow`` is raised for ``m < n + 1`` unless ``allow_low_degree``.
    """
    coeffs = [to_fraction(c) for c in coefficients]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    m = len(coeffs) - 1
    deltas = [to_fraction(d) for d in shifts]
    n = len(deltas)
    if n == 0:
        raise InvalidSpec("need at least one shift")
    if any(d == 0 for d in deltas):
        raise PreconditionViolated("shifts must be nonzero")
    if len(set(deltas)) != n:
        raise PreconditionViolated("shifts must be pairwise distinct")
    if m < n + 1 and not allow_low_degree:
        raise DegreeTooLow(f"degree {m} < n + 1 = {n + 1}")
    rows = [[d ** r for d in deltas] for r in range(1, m)]
    rank = exact_rank(rows) if rows else 0
    minor = None
    if m - 1 >= n:
        minor = Fraction(1)
        for i, d in enumerate(deltas):
            minor *= d
            for e in deltas[i + 1:]:
                minor *= e - d
    return IndependenceVerdict(rank == n, EXACT_RANK, 0, rank=rank, minor_determinant=minor,
                               extra={"degree": m, "matrix_rows": len(rows)})


# -- the arctan(e^x) family -------------------------------------------------------------

def arctan_wronskian_coefficients(s1, s2, s3, printed: bool = False):
    """``C_1..C_4`` of the closed form, from ``σ_i = e^{δ_i}``.

    With ``printed=True`` the second coefficient omits its ``(σ_3 - 1)``
    factor, reproducing a typo in the published formula.
    """
    common = (-1 + s1) * (s1 - s2) * (-1 + s2) * (s1 - s3) * (s2 - s3)
    full = common * (-1 + s3)
    c1 = -16 * full * (
        -s1 - s1**2 - s2 - 2*s1*s2 - s1**2*s2 - s2**2 - s1*s2**2 - s3 - 2*s1*s3 - s1**2*s3
        - 2*s2*s3 - 2*s1*s2*s3 - s2**2*s3 - s3**2 - s1*s3**2 - s2*s3**2)
    c2 = -16 * (common if printed else full) * (
        3*s1*s2*s3 + 3*s1**2*s2*s3 + 3*s1*s2**2*s3 + 3*s1*s2*s3**2)
    c3 = -16 * full * (
        -3*s1**2*s2**2*s3 - 3*s1**2*s2*s3**2 - 3*s1*s2**2*s3**2 - 3*s1**2*s2**2*s3**2)
    c4 = -16 * full * (
        s1**3*s2**2*s3 + s1**2*s2**3*s3 + s1**3*s2**3*s3 + s1**3*s2*s3**2 + 2*s1**2*s2**2*s3**2
        + 2*s1**3*s2**2*s3**2 + s1*s2**3*s3**2 + 2*s1**2*s2**3*s3**2 + s1**3*s2**3*s3**2
        + s1**2*s2*s3**3 + s1**3*s2*s3**3 + s1*s2**2*s3**3 + 2*s1**2*s2**2*s3**3
        + s1**3*s2**2*s3**3 + s1*s2**3*s3**3 + s1**2*s2**3*s3**3)
    return c1, c2, c3, c4


def arctan_wronskian_closed_form(d1, d2, d3, x, precision_bits: int = DEFAULT_PRECISION,
                                 printed: bool = False):
    """``W(Δ_{d1} f', Δ_{d2} f', Δ_{d3} f')(x)`` for ``f = arctan(e^x)``.

    With ``y = e^x`` and ``σ_i = e^{d_i}`` the value is::

        y^5 (C_1 y^4 + C_2 y^6 + C_3 y^8 + C_4 y^10)
        / ((1 + y^2)^3 prod (1 + σ_i^2 y^2)^3)

    ``printed=True`` evaluates the formula as commonly quoted (without the
    ``y^5`` factor and with the defective ``C_2``); it does not equal the
    Wronskian and is kept only for comparison.
    """
    with mpmath.workprec(precision_bits + 32):
        wp = precision_bits + 32
        y = mpmath.exp(to_mpf(x, wp))
        s1, s2, s3 = (mpmath.exp(to_mpf(d, wp)) for d in (d1, d2, d3))
        c1, c2, c3, c4 = arctan_wronskian_coefficients(s1, s2, s3, printed)
        num = c1 * y**4 + c2 * y**6 + c3 * y**8 + c4 * y**10
        if not printed:
            num *= y**5
        den = (1 + y**2)**3 * (1 + s1**2 * y**2)**3 * (1 + s2**2 * y**2)**3 * (1 + s3**2 * y**2)**3
        value = num / den
    with mpmath.workprec(precision_bits):
        return +value


# -- discrete-derivative families ---------------------------------------------------------

@dataclass(frozen=True)
class DeltaFamilySpec:
    """Base function ``f`` and distinct positive shifts ``δ_1, ..., δ_n``."""

    base: Expr
    shifts: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", _as_expr(self.base))
        shifts = tuple(to_fraction(d) for d in self.shifts)
        if not shifts:
            raise InvalidSpec("need at least one shift")
        if any(d <= 0 for d in shifts):
            raise PreconditionViolated("shifts must be positive")
        if len(set(shifts)) != len(shifts):
            raise PreconditionViolated("shifts must be pairwise distinct")
        object.__setattr__(self, "shifts", shifts)

    def members(self) -> tuple:
        return tuple(discrete_derivative(self.base, d) for d in self.shifts)

    def domain(self, interval: Interval) -> Interval:
        """``I ∩ (I - max δ)``, where every member is defined."""
        lo, hi = to_fraction(interval.lo), to_fraction(interval.hi)
        top = hi - max(self.shifts)
        if top <= lo:
            raise EmptyDomain(f"I ∩ (I - {max(self.shifts)}) is empty for I = [{lo}, {hi}]")
        return Interval(interval.lo, top)


def delta_family_independence(spec: DeltaFamilySpec, interval: Interval,
                              samples: int = DEFAULT_SAMPLES,
                              precision_bits: int = DEFAULT_PRECISION, threshold=None,
                              tolerance=None) -> IndependenceVerdict:
    """1-independence of ``{Δ_{δ_i} f}`` on ``I ∩ (I - max δ)``."""
    if not isinstance(interval, Interval):
        interval = Interval(*interval)
    family = FunctionFamily(spec.members(), spec.domain(interval))
    verdict = is_k_independent(family, 1, samples, precision_bits, threshold, tolerance)
    verdict.extra["members"] = [render(f) for f in family.members]
    verdict.extra["domain"] = [format_scalar(family.interval.lo), format_scalar(family.interval.hi)]
    return verdict
