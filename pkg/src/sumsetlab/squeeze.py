"""Explicit squeezing constructions, every element carrying its witness.

A witnessed element records a value together with the signed generators
that add up to it and the interval it was squeezed into, so membership in
the relevant sumset and the interval claim can both be re-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import (
    DisjointTranslateShortfall, HypothesisViolated, InjectivityViolation, NotConvex,
    PreconditionViolated, SizeCapExceeded, TooFewElements, TooSmall,
)
from .funcdsl import (
    Const, Expr, Interval, Mul, Var, compile_function, derivative_signs, is_rational_function,
    simplify, substitute,
)
from .scalars import DEFAULT_PRECISION, default_tolerance, format_scalar, to_fraction, to_mpf
from .sets import (
    EXACT, FLOAT, FiniteSet, convexity_order, default_size_cap, interval_count,
    sumset, working_precision,
)


@dataclass(frozen=True)
class WitnessedElement:
    """``value = sum(sign * generator for generator, sign in witness)``.

    ``tag`` identifies the interval the element was squeezed into (an index
    ``i`` or a pair such as ``(l, i)``); ``interval`` holds its endpoints and
    ``right_closed`` says whether the right endpoint is allowed.
    """

    value: object
    witness: tuple
    tag: object
    interval: tuple
    right_closed: bool = False

    def signed_sum(self):
        total = 0
        for gen, sign in self.witness:
            total = total + sign * gen
        return total

    def plus_minus_counts(self) -> tuple[int, int]:
        plus = sum(1 for _, s in self.witness if s > 0)
        return plus, len(self.witness) - plus

    def check(self, tolerance=None) -> bool:
        """Witness sum and interval claim; ``tolerance`` for float values."""
        lo, hi = self.interval
        if tolerance is None:
            if self.signed_sum() != self.value:
                return False
            upper = self.value <= hi if self.right_closed else self.value < hi
            return lo < self.value and upper
        # float values are binary rationals, so the comparison is done exactly
        tol = to_fraction(tolerance)
        total = sum(sign * to_fraction(gen) for gen, sign in self.witness)
        value = to_fraction(self.value)
        if abs(total - value) > tol:
            return False
        return to_fraction(lo) - tol < value < to_fraction(hi) + tol

    def to_dict(self, digits: int = 30) -> dict:
        tag = list(self.tag) if isinstance(self.tag, tuple) else self.tag
        return {
            "value": format_scalar(self.value, digits),
            "witness": [[format_scalar(g, digits), s] for g, s in self.witness],
            "tag": tag,
            "interval": [format_scalar(v, digits) for v in self.interval],
            "right_closed": self.right_closed,
        }


def _verify_all(elements, tolerance, what: str):
    for e in elements:
        if not e.check(tolerance):
            raise HypothesisViolated(f"{what}: element {e.value} fails its witness or interval")


# -- orientation ------------------------------------------------------------------------

@dataclass(frozen=True)
class Orientation:
    """How ``f`` was transformed so that ``f`` and ``f'`` both increase.

    ``reflect`` replaces ``x`` by ``-x`` (and the input set by its negation);
    ``negate`` replaces ``f`` by ``-f``.  Neither changes sumset sizes.
    """

    reflect: bool
    negate: bool
    function: Expr

    def apply_to_set(self, a: FiniteSet) -> FiniteSet:
        return a.negate() if self.reflect else a


def normalize_orientation(f: Expr, interval: Interval,
                          precision_bits: int = DEFAULT_PRECISION) -> Orientation:
    """Pick the reflection/negation making ``f`` increasing and convex on ``interval``.

    Raises :class:`PreconditionViolated` when ``f'`` or ``f''`` changes sign
    on the interval (split it with ``monotone_partition`` first).
    """
    s1, s2 = derivative_signs(f, interval, 2, precision_bits)
    if s1 == 0 or s2 == 0:
        raise PreconditionViolated(
            "f' and f'' must keep a strict sign on the working interval "
            f"(signs found: {s1}, {s2})")
    # f(-x) flips the sign of f' only; -f flips both
    reflect = s1 != s2
    negate = s2 < 0
    g = substitute(f, Mul(Const(Fraction(-1)), Var())) if reflect else f
    if negate:
        g = Mul(Const(Fraction(-1)), g)
    return Orientation(reflect, negate, simplify(g))


# -- Theorems 1.1 / 1.3 style squeezing ------------------------------------------------------

def _tolerance_for(a: FiniteSet):
    return None if a.mode == EXACT else a.dedup_tolerance * 8


def _level(points, depth: int, cap: int):
    """Elements ``E_depth`` of a strictly increasing list of (value, witness).

    ``E_k(X) = U_i (x_i + F_{k-1}(D) ∩ (0, d_i])`` with ``D`` the consecutive
    differences of ``X``, ``F_0(D) = D`` and ``F_j(D) = D ∪ E_j(D)``.
    """
    diffs = [(y[0] - x[0], y[1] + tuple((g, -s) for g, s in x[1]))
             for x, y in zip(points, points[1:])]
    pool = list(diffs)
    if depth > 1:
        seen = {v for v, _ in diffs}
        for v, w, _ in _level(diffs, depth - 1, cap):
            if v not in seen:
                seen.add(v)
                pool.append((v, w))
    pool.sort(key=lambda vw: vw[0])
    out = []
    for i, (d_i, _) in enumerate(diffs):
        x_val, x_wit = points[i]
        for v, w in pool:
            if v > d_i:
                break
            if v > 0:
                out.append((x_val + v, x_wit + w, i + 1))
                if len(out) > cap:
                    raise SizeCapExceeded(len(out), cap)
    return out


def squeeze_iterated(a: FiniteSet, k: int, cap: int | None = None):
    """Witnessed elements of ``2^k A - (2^k - 1) A`` squeezed between elements of A.

    Returns ``(count, elements)``.  Element tagged ``i`` lies in
    ``(a_i, a_{i+1}]``; values are pairwise distinct.  Witnesses are padded
    with cancelling ``(a_1, +1), (a_1, -1)`` pairs to exactly ``2^k`` plus
    and ``2^k - 1`` minus terms.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if convexity_order(a, k) < k:
        raise NotConvex(f"set is not {k}-convex (order {convexity_order(a, k)})")
    cap = default_size_cap() if cap is None else cap
    vals = list(a)
    prec = a.precision_bits or DEFAULT_PRECISION
    with mpmath.workprec(prec):
        points = [(v, ((v, 1),)) for v in vals]
        raw = _level(points, k, cap)
        pad = vals[0]
        plus_target, minus_target = 2 ** k, 2 ** k - 1
        elements = []
        for value, wit, i in raw:
            plus = sum(1 for _, s in wit if s > 0)
            minus = len(wit) - plus
            extra = plus_target - plus
            if extra < 0 or minus_target - minus != extra:
                raise HypothesisViolated("witness has unexpected length")
            wit = wit + ((pad, 1), (pad, -1)) * extra
            elements.append(WitnessedElement(value, wit, i, (vals[i - 1], vals[i]), True))
        _verify_all(elements, _tolerance_for(a), "squeeze")
    return len(elements), elements


def squeeze_basic(a: FiniteSet) -> list[WitnessedElement]:
    """``a_i + (a_{j+1} - a_j)`` for ``j <= i``, tagged with ``i``.

    Needs ``A`` 1-convex; yields ``|A|(|A|-1)/2`` distinct elements of
    ``A + A - A``.
    """
    return squeeze_iterated(a, 1)[1]


# -- discrete-derivative squeezing ------------------------------------------------------------

def _function_values(f: Expr, points, exact: bool, precision_bits: int):
    fn = compile_function(f)
    if exact:
        return [fn.exact(p) for p in points]
    return [fn(p, precision_bits) for p in points]


def _require_one_convex(f: Expr, lo, hi, precision_bits: int, what: str = "f"):
    signs = derivative_signs(f, Interval(lo, hi), 2, precision_bits)
    if signs != [1, 1]:
        raise PreconditionViolated(
            f"{what} must be strictly increasing and strictly convex on "
            f"[{format_scalar(lo, 12)}, {format_scalar(hi, 12)}] (derivative signs {signs})")


def squeeze_lemma_elements(f: Expr, d, a, s: FiniteSet,
                           precision_bits: int | None = None) -> list[WitnessedElement]:
    """``f(a) + Δ_d f(s)`` for ``s`` in ``S``, each inside ``(f(a), f(a+d))``."""
    prec = precision_bits or s.precision_bits or DEFAULT_PRECISION
    exact = s.mode == EXACT and is_rational_function(f)
    conv = to_fraction if exact else (lambda v: to_mpf(v, prec))
    d, a = conv(d), conv(a)
    if d <= 0:
        raise PreconditionViolated("d must be positive")
    if not len(s):
        return []
    if not to_fraction(s.max()) < to_fraction(a):
        raise PreconditionViolated("sup S must be strictly less than a")
    _require_one_convex(f, s.min(), a + d, prec)
    with mpmath.workprec(prec):
        pts = [conv(v) for v in s]
        fa, fad = _function_values(f, [a, a + d], exact, prec)
        fs = _function_values(f, pts, exact, prec)
        fsd = _function_values(f, [p + d for p in pts], exact, prec)
        out = [WitnessedElement(fa + y - x, ((fa, 1), (y, 1), (x, -1)), i + 1, (fa, fad))
               for i, (x, y) in enumerate(zip(fs, fsd))]
        _verify_all(out, None if exact else default_tolerance(prec), "squeezing lemma")
    return out


# -- good elements and the map Psi ------------------------------------------------------------

@dataclass
class GoodSubset:
    """Elements ``b_i`` (``i < |B|``) whose gaps hold few elements of ``2B - B``."""

    kept: FiniteSet
    rejected: FiniteSet
    threshold_left: Fraction
    threshold_right: Fraction
    total_left: int = 0
    total_right: int = 0
    counts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kept": [format_scalar(v) for v in self.kept],
            "rejected": [format_scalar(v) for v in self.rejected],
            "threshold_left": format_scalar(self.threshold_left),
            "threshold_right": format_scalar(self.threshold_right),
            "total_left": self.total_left,
            "total_right": self.total_right,
            "counts": self.counts,
        }


def _gap_counts(values, cap):
    """``n(b_i, b_{i+1}) = |(2B - B) ∩ (b_i, b_{i+1}]|`` and the total count."""
    s = sumset(values, spec=(2, 1), cap=cap)
    vals = list(values)
    gaps = [interval_count(s, x, y, right_closed=True) for x, y in zip(vals, vals[1:])]
    total = interval_count(s, vals[0], vals[-1], right_closed=True)
    return gaps, total


def good_elements(b: FiniteSet, f: Expr, precision_bits: int | None = None,
                  cap: int | None = None) -> GoodSubset:
    """Split ``b_1..b_{|B|-1}`` into good and bad elements.

    ``b_i`` is good when ``n_B(b_i, b_{i+1}) <= 4 n_B(b_1, b_|B|) / |B|`` and
    the same holds for ``F(B)``.  Counting shows at least
    ``ceil(|B|/2) - 1`` elements are good; this is checked.
    """
    if len(b) < 3:
        raise TooSmall("good_elements needs |B| >= 3")
    prec = precision_bits or b.precision_bits or DEFAULT_PRECISION
    _require_one_convex(f, b.min(), b.max(), prec, "F")
    exact = b.mode == EXACT and is_rational_function(f)
    vals = list(b)
    fvals = _function_values(f, vals, exact, prec)
    fb = FiniteSet(fvals, mode=EXACT if exact else FLOAT, precision_bits=prec)
    if len(fb) != len(b):
        raise InjectivityViolation("F is not injective on B")
    gaps_b, total_b = _gap_counts(b, cap)
    gaps_f, total_f = _gap_counts(fb, cap)
    n = len(b)
    thr_b = Fraction(4 * total_b, n)
    thr_f = Fraction(4 * total_f, n)
    kept, rejected, counts = [], [], []
    for i in range(n - 1):
        good = gaps_b[i] <= thr_b and gaps_f[i] <= thr_f
        (kept if good else rejected).append(vals[i])
        counts.append({"b": format_scalar(vals[i]), "n_B": gaps_b[i], "n_FB": gaps_f[i],
                       "good": good})
    if len(kept) < math.ceil(n / 2) - 1:
        raise HypothesisViolated(f"only {len(kept)} good elements out of {n}")
    mode = b.mode
    return GoodSubset(FiniteSet(kept, mode=mode, precision_bits=prec),
                      FiniteSet(rejected, mode=mode, precision_bits=prec),
                      thr_b, thr_f, total_b, total_f, counts)


def psi_map(b: FiniteSet, f: Expr, precision_bits: int | None = None) -> list[tuple]:
    """``[(b_{i+1} - b_i, F(b_{i+1}) - F(b_i))]`` over consecutive elements.

    Raises :class:`InjectivityViolation` when two indices give the same pair,
    which happens only if ``F`` fails to be strictly convex on the span.
    """
    prec = precision_bits or b.precision_bits or DEFAULT_PRECISION
    exact = b.mode == EXACT and is_rational_function(f)
    vals = list(b) if exact else [to_mpf(v, prec) for v in b]
    with mpmath.workprec(prec):
        fvals = _function_values(f, vals, exact, prec)
        pairs = [(y - x, fy - fx) for x, y, fx, fy in zip(vals, vals[1:], fvals, fvals[1:])]
    if exact:
        collide = len(set(pairs)) != len(pairs)
    else:
        tol = default_tolerance(prec)
        collide = any(abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol
                      for i, p in enumerate(pairs) for q in pairs[i + 1:])
    if collide:
        raise InjectivityViolation("two gaps map to the same (difference, F-difference) pair")
    return pairs


# -- B_d classes ----------------------------------------------------------------------------

@dataclass
class BdDecomposition:
    """``B_d = {b_i : b_{i+1} - b_i = d}`` for every gap ``d``, in index order."""

    classes: dict

    def differences(self) -> list:
        return sorted(self.classes)

    def truncation(self, d, i: int) -> list:
        """``B_d(i)``: the first ``i`` elements of ``B_d``."""
        return self.classes[d][:i]

    def sizes(self) -> dict:
        return {d: len(v) for d, v in self.classes.items()}

    def to_dict(self) -> dict:
        return {format_scalar(d): [format_scalar(v) for v in members]
                for d, members in sorted(self.classes.items())}


def bd_decomposition(b: FiniteSet) -> BdDecomposition:
    if len(b) < 2:
        raise TooSmall("need at least two elements")
    if b.mode != EXACT:
        raise PreconditionViolated("gap classes need exact gaps; use an exact set")
    vals = list(b)
    classes: dict = {}
    for x, y in zip(vals, vals[1:]):
        classes.setdefault(y - x, []).append(x)
    return BdDecomposition(classes)


# -- translates of a minimal tuple ----------------------------------------------------------

@dataclass
class TranslateSqueeze:
    """Result of the minimal-tuple translate construction.

    ``tuple_`` is the minimal (n+1)-tuple, ``shifts`` the offsets
    ``δ_l = a_l - a_0``, ``translates`` the set ``H`` and ``sets[(l, i)]``
    the witnessed elements of ``T_l(i)``.  All values refer to the
    normalised function and set described by ``orientation``.
    """

    tuple_: tuple
    shifts: tuple
    translates: FiniteSet
    sets: dict
    orientation: Orientation

    def to_dict(self, digits: int = 30) -> dict:
        return {
            "tuple": [format_scalar(v, digits) for v in self.tuple_],
            "shifts": [format_scalar(v, digits) for v in self.shifts],
            "translates": [format_scalar(v, digits) for v in self.translates],
            "reflect": self.orientation.reflect,
            "negate": self.orientation.negate,
            "sets": [{"l": l, "i": i, "elements": [e.to_dict(digits) for e in elems]}
                     for (l, i), elems in sorted(self.sets.items())],
        }


def minimal_tuple(a: FiniteSet, n: int) -> tuple:
    """Leftmost ``n+1`` consecutive elements of minimal diameter."""
    vals = list(a)
    if len(vals) < n + 1:
        raise TooFewElements(f"need at least {n + 1} elements, got {len(vals)}")
    with working_precision(a):
        best = min(range(len(vals) - n), key=lambda i: (vals[i + n] - vals[i], i))
    return tuple(vals[best:best + n + 1])


def greedy_translates(a: FiniteSet, diameter) -> list:
    """Left-to-right maximal ``h`` with pairwise disjoint ``[a_0, a_n] - h``."""
    chosen = []
    with working_precision(a):
        for h in a:
            if not chosen or h - chosen[-1] > diameter:
                chosen.append(h)
    return chosen


def tuple_squeeze_translates(a: FiniteSet, n: int, f: Expr,
                             precision_bits: int | None = None) -> TranslateSqueeze:
    """Squeeze translated tuples of ``f(A - A)`` into each other.

    ``T_l(i) = { f(a_0 - h_i) + Δ_{δ_l} f(a_0 - h_j) : j > i }``, each
    element inside ``(f(a_0 - h_i), f(a_l - h_i))``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if len(a) < n + 1:
        raise TooFewElements(f"need at least {n + 1} elements, got {len(a)}")
    prec = precision_bits or a.precision_bits or DEFAULT_PRECISION
    span = a.max() - a.min()
    orient = normalize_orientation(f, Interval(-span, span), prec)
    g, work = orient.function, orient.apply_to_set(a)

    tup = minimal_tuple(work, n)
    a0 = tup[0]
    with working_precision(work):
        diameter = tup[-1] - a0
        shifts = tuple(t - a0 for t in tup[1:])
    hs = greedy_translates(work, diameter)
    need = len(a) // (2 * (n + 1))
    if len(hs) < need:
        raise DisjointTranslateShortfall(f"found {len(hs)} disjoint translates, need {need}")

    exact = work.mode == EXACT and is_rational_function(g)
    tol = None if exact else default_tolerance(prec)
    sets = {}
    with mpmath.workprec(prec):
        # f(a_l - h) for every tuple position l and translate h
        table = [_function_values(g, [t - h for h in hs], exact, prec) for t in tup]
        base = table[0]
        for l in range(1, n + 1):
            row = table[l]
            for i in range(len(hs)):
                elems = [WitnessedElement(base[i] + row[j] - base[j],
                                          ((base[i], 1), (row[j], 1), (base[j], -1)),
                                          (l, i + 1), (base[i], row[i]))
                         for j in range(i + 1, len(hs))]
                _verify_all(elems, tol, "translate squeeze")
                sets[(l, i + 1)] = elems
    mode = work.mode
    return TranslateSqueeze(tup, shifts, FiniteSet(hs, mode=mode, precision_bits=prec),
                            sets, orient)


# -- equidistribution ---------------------------------------------------------------------

def equidistribution_violations(a: FiniteSet, cap: int | None = None) -> list[tuple]:
    """Pairs ``a' < a`` breaking ``a - a' <= d_N`` where ``N = n_A(a', a)``.

    ``d_N`` is the ``N``-th smallest positive element of ``A - A``.  The
    list is always empty; it exists so the property can be checked.
    """
    vals = list(a)
    s = sumset(a, spec=(2, 1), cap=cap)
    positive = [v for v in sumset(a, spec=(1, 1), cap=cap) if v > 0]
    bad = []
    with working_precision(a):
        for i, lo in enumerate(vals):
            for hi in vals[i + 1:]:
                count = interval_count(s, lo, hi, right_closed=True)
                if count <= len(positive) and hi - lo > positive[count - 1]:
                    bad.append((lo, hi, count))
    return bad


__all__ = [
    "BdDecomposition", "GoodSubset", "Orientation", "TranslateSqueeze", "WitnessedElement",
    "bd_decomposition", "equidistribution_violations", "good_elements", "greedy_translates",
    "minimal_tuple", "normalize_orientation", "psi_map", "squeeze_basic", "squeeze_iterated",
    "squeeze_lemma_elements", "tuple_squeeze_translates",
]
