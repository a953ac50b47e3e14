"""Exponent sequences, instance generators and growth-exponent fits.

``verify_theorem`` measures one side of a lower bound ``|S(A)| >> |A|^e``
exactly at several sizes, fits ``e`` on a log-log scale and compares it
with the target exponent minus a slack.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import Degenerate, HypothesisViolated, InvalidSpec, TooSmall
from .funcdsl import (
    Expr, Interval, derivative_signs, image, is_polynomial, parse, polynomial_coefficients,
    render,
)
from .independence import (
    DeltaFamilySpec, FunctionFamily, delta_family_independence, is_k_independent,
    polynomial_delta_independence,
)
from .scalars import DEFAULT_PRECISION
from .sets import EXACT, FiniteSet, SignedSumSpec, convexity_order, n_k_count, sumset
from .squeeze import minimal_tuple

THEOREMS = ("T1_1", "T1_3", "T1_5", "T1_6", "T1_7", "T1_8", "C1_9")
FAMILIES = ("ap", "geometric", "power_image", "perturbed_convex", "random")
DEFAULT_SLACK = 0.2
# below this largest size a T1_7 shortfall is reported as inconclusive
T1_7_MIN_SIZE = 16

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


# -- sequences -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def phi(n: int) -> Fraction:
    """``φ(1) = 1``, ``φ(n) = 1 + 1/(1 + 1/φ(n-1))``."""
    if n < 1:
        raise ValueError("phi is defined for n >= 1")
    value = Fraction(1)
    for _ in range(n - 1):
        value = 1 + 1 / (1 + 1 / value)
    return value


@lru_cache(maxsize=None)
def _p_table(j: int) -> tuple[int, ...]:
    table = [1, 1]
    total = 2  # p(0) + p(1)
    while len(table) <= j:
        nxt = table[-1] + total
        table.append(nxt)
        total += nxt
    return tuple(table[:j + 1])


def p_seq(j: int) -> int:
    """``p(0) = p(1) = 1``, ``p(j) = p(j-1) + sum_{i<j} p(i)``."""
    if j < 0:
        raise ValueError("p is defined for j >= 0")
    return _p_table(max(j, 1))[j]


def q_seq(k: int) -> int:
    """``q(k) = sum_{i<k} p(i)``."""
    if k < 0:
        raise ValueError("q is defined for k >= 0")
    if k == 0:
        return 0
    return sum(_p_table(max(k - 1, 1))[:k])


# -- instance generators ---------------------------------------------------------------

def _rng(kind: str, size: int, seed: int) -> random.Random:
    # one independent stream per (kind, size, seed)
    return random.Random(f"{kind}:{size}:{seed}")


def _jitter_scale(k: int, jitter: int) -> int:
    # the (k+1)-th differences of S*i^(k+1) equal S*(k+1)!, those of the
    # jitter are at most 2^(k+1)*jitter; S is chosen so the former win
    return 2 ** (k + 1) * jitter // math.factorial(k + 1) + 1


def generate_family(kind: str, size: int, seed: int = 0, *, f: Expr | str | None = None,
                    exponent: int = 2, k: int = 1, jitter: int = 1) -> FiniteSet:
    """Deterministic test set of ``size`` elements.

    ``ap`` is ``{1..N}``, ``geometric`` is ``{2, 4, ..., 2^N}``,
    ``power_image`` is ``f([N])`` (``f = x^exponent`` unless given),
    ``perturbed_convex`` is ``{S i^(k+1) + η_i}`` with seeded jitter
    ``|η_i| <= jitter`` small enough that the set stays ``k``-convex, and
    ``random`` draws ``N`` distinct integers from ``[1, max(N^3, 10N)]``.
    """
    if size < 3:
        raise TooSmall(f"family size must be at least 3, got {size}")
    if kind == "ap":
        return FiniteSet.range(1, size + 1)
    if kind == "geometric":
        return FiniteSet([2 ** i for i in range(1, size + 1)])
    if kind == "power_image":
        g = parse(f) if isinstance(f, str) else (f if f is not None else parse(f"x^{exponent}"))
        return image(g, FiniteSet.range(1, size + 1))
    if kind == "perturbed_convex":
        if k < 1:
            raise ValueError("k must be positive")
        if size < k + 2:
            raise TooSmall(f"a {k}-convex set needs at least {k + 2} elements")
        rng = _rng(kind, size, seed)
        scale = _jitter_scale(k, jitter)
        vals = [scale * i ** (k + 1) + rng.randint(-jitter, jitter) for i in range(1, size + 1)]
        out = FiniteSet(vals)
        assert len(out) == size and convexity_order(out, k) >= k
        return out
    if kind == "random":
        rng = _rng(kind, size, seed)
        hi = max(size ** 3, 10 * size)
        return FiniteSet(rng.sample(range(1, hi + 1), size))
    raise InvalidSpec(f"unknown family {kind!r}; expected one of {', '.join(FAMILIES)}")


# -- exponent fitting ------------------------------------------------------------------

def exponent_fit(records: Sequence) -> tuple[float, float]:
    """Least-squares slope of ``log count`` against ``log N``.

    ``records`` holds ``(N, count)`` pairs.  Returns the slope and the
    largest absolute log-deviation from the fitted line.
    """
    pairs = [(float(n), float(c)) for n, c in records]
    ns = [n for n, _ in pairs]
    if pairs and len(set(ns)) == 1:
        raise Degenerate("all sizes are equal; the exponent is undetermined")
    if len(pairs) < 3:
        raise ValueError(f"need at least 3 records, got {len(pairs)}")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("sizes must be strictly increasing")
    if any(c <= 0 for _, c in pairs):
        raise ValueError("counts must be positive")
    x = np.log(ns)
    y = np.log([c for _, c in pairs])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return float(slope), residual


class GrowthExponentRegressor(RegressorMixin, BaseEstimator):
    """Power law ``count ≈ C N^e`` fitted by least squares in log-log space.

    After ``fit``: ``exponent_``, ``coefficient_`` (``C``) and
    ``residual_`` (max absolute log-deviation).
    """

    def fit(self, X, y):
        n = np.asarray(X, dtype=float).reshape(-1)
        counts = np.asarray(y, dtype=float).reshape(-1)
        if n.shape != counts.shape:
            raise ValueError("X and y must have the same number of samples")
        order = np.argsort(n, kind="stable")
        self.exponent_, self.residual_ = exponent_fit(zip(n[order], counts[order]))
        self.coefficient_ = float(np.exp(np.mean(np.log(counts) - self.exponent_ * np.log(n))))
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        n = np.asarray(X, dtype=float).reshape(-1)
        return self.coefficient_ * n ** self.exponent_


# -- reports -------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthRecord:
    """One instance: ``|A|``, the tripling constant ``K`` and the measured size.

    ``value`` is what the fit uses; it equals ``count`` except where the
    bound carries a power of ``K`` that is moved to the left side.
    """

    n: int
    count: int
    k_tripling: Fraction
    value: float

    def to_dict(self) -> dict:
        return {"n": self.n, "count": self.count,
                "k_tripling": _json_float(self.k_tripling), "value": _json_float(self.value)}


def _json_float(x) -> float:
    # 15 significant digits survive every JSON round trip byte for byte
    return float(f"{float(x):.15g}")


@dataclass
class GrowthReport:
    theorem: str
    family: str
    records: list[GrowthRecord]
    fitted: float
    residual: float
    target: Fraction
    slack: float
    verdict: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "family": self.family,
            "records": [r.to_dict() for r in self.records],
            "fitted": _json_float(self.fitted),
            "residual": _json_float(self.residual),
            "target": _json_float(self.target),
            "target_exact": str(self.target),
            "slack": self.slack,
            "verdict": self.verdict,
            "params": self.params,
        }


def verdict_for(fitted: float, target, slack: float) -> str:
    return PASS if fitted >= float(target) - slack else FAIL


def build_report(theorem: str, family: str, records: list[GrowthRecord], target,
                 slack: float = DEFAULT_SLACK, params: dict | None = None) -> GrowthReport:
    fitted, residual = exponent_fit([(r.n, r.value) for r in records])
    return GrowthReport(theorem, family, records, fitted, residual, Fraction(target), slack,
                        verdict_for(fitted, target, slack), dict(params or {}))


# -- theorem checks --------------------------------------------------------------------

def tripling_constant(a: FiniteSet, cap: int | None = None) -> Fraction:
    """``K = |A + A - A| / |A|``."""
    return Fraction(len(sumset(a, a, (2, 1), cap)), len(a))


def _span(a: FiniteSet) -> Interval:
    return Interval(a.min(), a.max())


def _as_exprs(functions) -> list[Expr]:
    return [parse(f) if isinstance(f, str) else f for f in functions]


def _require(ok: bool, check: str, detail: str):
    if not ok:
        raise HypothesisViolated(f"{check} failed: {detail}")


def _check_convex_set(a: FiniteSet, k: int):
    order = convexity_order(a, k)
    _require(order >= k, f"{k}-convexity of A", f"|A|={len(a)} has convexity order {order}")


def _check_convex_function(f: Expr, a: FiniteSet, k: int, prec: int):
    signs = derivative_signs(f, _span(a), k + 1, prec)
    _require(all(s == 1 for s in signs), f"{k}-convexity of {render(f)}",
             f"derivative signs {signs} on [{a.min()}, {a.max()}]")


def _check_independent(functions: list[Expr], a: FiniteSet, k: int, prec: int):
    verdict = is_k_independent(FunctionFamily(functions, _span(a)), k,
                               precision_bits=prec)
    names = ", ".join(render(f) for f in functions)
    _require(verdict.independent is True, f"{k}-independence of {{{names}}}",
             f"method {verdict.method}")


def _tuple_shifts(a: FiniteSet, n: int) -> tuple:
    tup = minimal_tuple(a, n)
    return tuple(t - tup[0] for t in tup[1:])


def _check_delta_independent(f: Expr, a: FiniteSet, n: int, prec: int):
    shifts = _tuple_shifts(a, n)
    span = a.max() - a.min()
    verdict = delta_family_independence(DeltaFamilySpec(f, shifts), Interval(-span, span),
                                        precision_bits=prec)
    _require(verdict.independent is True, f"1-independence of Δ-shifts of {render(f)}",
             f"shifts {[str(d) for d in shifts]}, method {verdict.method}")


def _check_polynomial_degree(f: Expr, a: FiniteSet, n: int):
    _require(is_polynomial(f), "polynomiality", f"{render(f)} is not a polynomial")
    coeffs = polynomial_coefficients(f)
    degree = len(coeffs) - 1
    _require(degree >= n + 1, "degree >= n + 1", f"degree {degree} with n = {n}")
    verdict = polynomial_delta_independence(coeffs, _tuple_shifts(a, n))
    _require(verdict.independent is True, "exact Δ-independence", f"rank {verdict.rank}")


def _difference_image(f: Expr, a: FiniteSet, prec: int, cap) -> FiniteSet:
    diffs = sumset(a, a, (1, 1), cap)
    return image(f, diffs, precision_bits=prec)


def verify_theorem(theorem: str, sizes: Sequence[int], *, family: str | None = None,
                   k: int = 1, n: int | None = None, functions=None, seed: int = 0,
                   slack: float = DEFAULT_SLACK, cap: int | None = None,
                   precision_bits: int = DEFAULT_PRECISION) -> GrowthReport:
    """Measure one growth bound across ``sizes`` and fit its exponent.

    ==========  =================================================  ======================
    theorem     measured quantity                                  target exponent
    ==========  =================================================  ======================
    ``T1_1``    ``|A+A-A|`` for convex ``A``                         2
    ``T1_3``    ``|2^k A - (2^k-1) A|`` for ``k``-convex ``A``        k+1
    ``T1_5``    ``|2^k f(A) - (2^k-1) f(A)| * K^(2^(k+1)-k-2)``      k+1
    ``T1_6``    ``N_k(f(A)) N_k(g(A)) * K^(5*2^(k-1)-2k-3)``         2k+1
    ``T1_7``    ``max_f N_{n-1}(f(A))`` over ``n`` functions          φ(n)
    ``T1_8``    ``|2^n f(A-A) - (2^n-1) f(A-A)|``                   1+φ(n)
    ``C1_9``    same, ``f`` a polynomial of degree ``>= n+1``         1+φ(n)
    ==========  =================================================  ======================

    ``K = |A+A-A|/|A|`` is measured exactly per instance.  Hypotheses are
    checked on every instance and a failure raises ``HypothesisViolated``.
    """
    if theorem not in THEOREMS:
        raise InvalidSpec(f"unknown theorem {theorem!r}; expected one of {', '.join(THEOREMS)}")
    sizes = sorted(set(int(s) for s in sizes))
    if len(sizes) < 3:
        raise ValueError("need at least three distinct sizes")
    if k < 1:
        raise ValueError("k must be positive")
    if slack < 0:
        raise ValueError("slack must be non-negative")
    prec = precision_bits
    fs = _as_exprs(functions) if functions else None

    if theorem == "T1_1":
        k = 1
    if theorem in ("T1_1", "T1_3"):
        family = family or "perturbed_convex"
        target = Fraction(k + 1)
    elif theorem == "T1_5":
        family = family or "ap"
        fs = fs or [parse(f"x^{k + 1}")]
        target = Fraction(k + 1)
        k_power = 2 ** (k + 1) - k - 2
    elif theorem == "T1_6":
        family = family or "ap"
        fs = fs or [parse(f"x^{k + 1}"), parse(f"x^{k + 2}")]
        if len(fs) != 2:
            raise InvalidSpec("T1_6 takes exactly two functions")
        target = Fraction(2 * k + 1)
        k_power = 5 * 2 ** (k - 1) - 2 * k - 3
    elif theorem == "T1_7":
        family = family or "ap"
        fs = fs or [parse("x^2"), parse("x^3")]
        n = len(fs) if n is None else n
        if n != len(fs):
            raise InvalidSpec(f"T1_7 with n={n} needs exactly n functions, got {len(fs)}")
        target = phi(n)
    else:
        family = family or "random"
        fs = fs or [parse("x^3")]
        n = 1 if n is None else n
        if n < 1:
            raise ValueError("n must be positive")
        target = 1 + phi(n)
    if fs and theorem != "T1_6" and theorem != "T1_7" and len(fs) != 1:
        raise InvalidSpec(f"{theorem} takes a single function")

    records = []
    for size in sizes:
        a = generate_family(family, size, seed, k=k)
        kt = tripling_constant(a, cap)
        if theorem in ("T1_1", "T1_3"):
            _check_convex_set(a, k)
            count = len(sumset(a, a, SignedSumSpec.doubling(k), cap))
            value = count
        elif theorem == "T1_5":
            _check_convex_function(fs[0], a, k, prec)
            count = len(sumset(image(fs[0], a, precision_bits=prec), None,
                               SignedSumSpec.doubling(k), cap))
            value = count * kt ** k_power
        elif theorem == "T1_6":
            _check_independent(fs, a, k, prec)
            counts = [n_k_count(image(g, a, precision_bits=prec), k, cap) for g in fs]
            count = counts[0] * counts[1]
            value = count * kt ** k_power
        elif theorem == "T1_7":
            _check_independent(fs, a, 1, prec)
            if n == 1:
                count = len(image(fs[0], a, precision_bits=prec))
            else:
                count = max(n_k_count(image(g, a, precision_bits=prec), n - 1, cap) for g in fs)
            value = count
        else:
            if theorem == "C1_9":
                _check_polynomial_degree(fs[0], a, n)
            else:
                _check_delta_independent(fs[0], a, n, prec)
            fd = _difference_image(fs[0], a, prec, cap)
            count = len(sumset(fd, None, SignedSumSpec.doubling(n), cap))
            value = count
        if value <= 0:
            raise HypothesisViolated(f"measured quantity vanished at |A|={size}")
        records.append(GrowthRecord(size, count, kt, float(value)))

    params = {"k": k, "n": n, "seed": seed, "sizes": sizes, "precision_bits": prec,
              "functions": [render(f) for f in fs] if fs else []}
    report = build_report(theorem, family, records, target, slack, params)
    if theorem == "T1_7" and report.verdict == FAIL and sizes[-1] < T1_7_MIN_SIZE:
        report.verdict = INCONCLUSIVE
    return report


def sharpness_counts(k: int, sizes: Sequence[int], cap: int | None = None) -> list[tuple[int, int]]:
    """``|2^k f(A) - (2^k-1) f(A)|`` for ``A = [N]`` and ``f = x^(k+1)``."""
    out = []
    for size in sizes:
        fa = FiniteSet([i ** (k + 1) for i in range(1, size + 1)], mode=EXACT)
        out.append((size, len(sumset(fa, None, SignedSumSpec.doubling(k), cap))))
    return out


__all__ = [
    "DEFAULT_SLACK", "FAMILIES", "GrowthExponentRegressor", "GrowthRecord", "GrowthReport",
    "THEOREMS", "build_report", "exponent_fit", "generate_family", "p_seq", "phi", "q_seq",
    "sharpness_counts", "tripling_constant", "verify_theorem",
]
