import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumsetlab.errors import (
    InjectivityViolation, NotConvex, PreconditionViolated, TooFewElements, TooSmall,
)
from sumsetlab.funcdsl import Interval, derivative_signs, parse
from sumsetlab.sets import FiniteSet, SignedSumSpec, convexity_order, sumset
from sumsetlab.squeeze import (
    WitnessedElement, bd_decomposition, equidistribution_violations, good_elements,
    greedy_translates, minimal_tuple, normalize_orientation, psi_map, squeeze_basic,
    squeeze_iterated, squeeze_lemma_elements, tuple_squeeze_translates,
)


def _integrate(diffs, start):
    out = [start]
    for d in diffs:
        out.append(out[-1] + d)
    return out


@st.composite
def convex_sets(draw, k, min_size=3, max_size=9):
    """k-convex integer sets built by integrating positive (k+1)-th differences."""
    n = draw(st.integers(max(min_size, k + 2), max_size))
    seq = draw(st.lists(st.integers(1, 6), min_size=n - k - 1, max_size=n - k - 1))
    for _ in range(k):
        seq = _integrate(seq, draw(st.integers(1, 5)))
    values = _integrate(seq, draw(st.integers(-20, 20)))
    return FiniteSet(values)


# -- witnessed elements ------------------------------------------------------------------

def test_witnessed_element_check():
    e = WitnessedElement(5, ((4, 1), (2, 1), (1, -1)), 3, (4, 8), True)
    assert e.check() and e.plus_minus_counts() == (2, 1)
    assert not WitnessedElement(9, ((4, 1), (2, 1), (1, -1)), 3, (4, 8), True).check()
    assert not WitnessedElement(8, ((4, 1), (4, 1), (0, -1)), 3, (4, 8), False).check()


# -- squeezing convex sets -----------------------------------------------------------------

def test_squeeze_basic_examples():
    elems = squeeze_basic(FiniteSet([1, 2, 4, 8]))
    assert len(elems) == 6
    top = sorted(e.value for e in elems if e.interval == (4, 8))
    assert top == [5, 6, 8]
    with pytest.raises(NotConvex):
        squeeze_basic(FiniteSet([1, 2, 3]))


def test_squeeze_iterated_examples():
    a = FiniteSet([1, 2, 4, 8])
    count, elems = squeeze_iterated(a, 2)
    assert count == 7
    assert sorted(e.value for e in elems) == list(range(2, 9))
    assert [e.value for e in squeeze_iterated(a, 1)[1]] == [e.value for e in squeeze_basic(a)]


def test_squeeze_powers_of_two_k3():
    a = FiniteSet([2 ** i for i in range(12)])
    count, elems = squeeze_iterated(a, 3)
    s = sumset(a, spec=SignedSumSpec.doubling(3))
    assert all(e.value in s for e in elems)
    assert all(e.plus_minus_counts() == (8, 7) for e in elems)
    assert count == len({e.value for e in elems})


@given(convex_sets(1, max_size=12))
def test_squeeze_basic_count_and_membership(a):
    elems = squeeze_basic(a)
    n = len(a)
    assert len(elems) == n * (n - 1) // 2
    assert len({e.value for e in elems}) == len(elems)
    s = sumset(a, spec=(2, 1))
    assert all(e.check() and e.value in s for e in elems)
    assert len(s) >= n * (n - 1) // 2


@pytest.mark.parametrize("k", [2, 3])
@given(data=st.data())
def test_squeeze_iterated_membership(k, data):
    a = data.draw(convex_sets(k, max_size=8))
    count, elems = squeeze_iterated(a, k)
    s = sumset(a, spec=SignedSumSpec.doubling(k))
    assert count == len({e.value for e in elems})
    for e in elems:
        assert e.check() and e.value in s
        assert e.plus_minus_counts() == (2 ** k, 2 ** k - 1)


def test_squeeze_float_set_keeps_full_precision():
    with mpmath.workprec(128):
        vals = [i * i + mpmath.sqrt(2) * i for i in range(1, 9)]
    a = FiniteSet(vals, mode="float")
    count, elems = squeeze_iterated(a, 1)
    assert count == 28
    tol = mpmath.mpf(2) ** -100
    assert all(e.check(tol) for e in elems)


def test_squeeze_requires_convexity():
    with pytest.raises(NotConvex):
        squeeze_iterated(FiniteSet([1, 2, 4, 8]), 3)  # order 2 only


# -- squeezing lemma -----------------------------------------------------------------------

def test_squeeze_lemma_example():
    elems = squeeze_lemma_elements(parse("x^2"), 1, 10, FiniteSet([1, 2]))
    assert [e.value for e in elems] == [103, 105]
    assert all(100 < e.value < 121 and e.check() for e in elems)
    assert squeeze_lemma_elements(parse("x^2"), 1, 10, FiniteSet([])) == []
    with pytest.raises(PreconditionViolated):
        squeeze_lemma_elements(parse("x^2"), 1, 2, FiniteSet([1, 2]))


@given(st.lists(st.fractions(min_value=Fraction(1, 8), max_value=3, max_denominator=8), min_size=1,
                max_size=6, unique=True),
       st.fractions(min_value=Fraction(1, 8), max_value=2, max_denominator=8))
def test_squeeze_lemma_elements_lie_in_interval(s, d):
    a = max(s) + Fraction(1, 8)
    for f in ("exp(x)", "x^3"):
        elems = squeeze_lemma_elements(parse(f), d, a, FiniteSet(s))
        assert len(elems) == len(s)
        assert all(e.check(mpmath.mpf(2) ** -60) for e in elems)


# -- good elements, psi, B_d ---------------------------------------------------------------

def test_good_elements_examples():
    ap = good_elements(FiniteSet(range(1, 9)), parse("x^2"))
    assert list(ap.kept) == list(range(1, 8))
    geo = good_elements(FiniteSet([1, 2, 4, 8]), parse("x^2"))
    assert list(geo.kept) == [1, 2, 4]
    with pytest.raises(TooSmall):
        good_elements(FiniteSet([1, 2]), parse("x^2"))


@given(st.lists(st.integers(1, 60), min_size=3, max_size=10, unique=True))
def test_good_elements_bound(vals):
    b = FiniteSet(vals)
    g = good_elements(b, parse("x^2"))
    assert len(g.kept) >= math.ceil(len(b) / 2) - 1
    assert len(g.kept) + len(g.rejected) == len(b) - 1


def test_psi_map_examples():
    assert psi_map(FiniteSet([1, 2, 4]), parse("x^2")) == [(1, 3), (2, 12)]
    assert len(psi_map(FiniteSet([1, 2]), parse("exp(x)"))) == 1
    with pytest.raises(InjectivityViolation):
        psi_map(FiniteSet([1, 2, 3]), parse("x"))


@given(st.lists(st.integers(-30, 30), min_size=2, max_size=10, unique=True))
def test_psi_map_injective_for_convex_f(vals):
    b = FiniteSet(vals)
    for f in ("x^2", "exp(x/8)"):
        pairs = psi_map(b, parse(f))
        assert len(pairs) == len(b) - 1


def test_bd_decomposition_examples():
    assert bd_decomposition(FiniteSet([1, 2, 3, 5])).classes == {1: [1, 2], 2: [3]}
    assert bd_decomposition(FiniteSet([1, 2, 4, 8])).sizes() == {1: 1, 2: 1, 4: 1}
    ap = bd_decomposition(FiniteSet(range(1, 29, 3)))
    assert ap.sizes() == {3: 9}
    assert ap.truncation(3, 2) == [1, 4]


# -- orientation and translates ------------------------------------------------------------

@pytest.mark.parametrize("f,interval", [("log(x)", (1, 2)), ("-x^2", (1, 2)),
                                        ("x^2", (-2, -1)), ("exp(x)", (0, 1))])
def test_orientation_makes_f_increasing_and_convex(f, interval):
    o = normalize_orientation(parse(f), Interval(*interval))
    lo, hi = interval
    work = Interval(-hi, -lo) if o.reflect else Interval(lo, hi)
    assert derivative_signs(o.function, work, 2) == [1, 1]


def test_orientation_rejects_inflection():
    with pytest.raises(PreconditionViolated):
        normalize_orientation(parse("x^3"), Interval(-1, 1))


def test_tuple_squeeze_example():
    a = FiniteSet([1, 2, 3, 10, 20, 30, 40])
    ts = tuple_squeeze_translates(a, 2, parse("exp(x/10)"))
    assert ts.tuple_ == (1, 2, 3)
    assert ts.shifts == (1, 2)
    assert list(ts.translates) == [1, 10, 20, 30, 40]
    tol = mpmath.mpf(2) ** -60
    for elems in ts.sets.values():
        assert all(e.check(tol) for e in elems)


def test_tuple_squeeze_boundaries():
    a = FiniteSet([1, 2, 4, 8])
    ts = tuple_squeeze_translates(a, 3, parse("exp(x)"))
    assert ts.tuple_ == (1, 2, 4, 8)
    assert all(not elems for elems in ts.sets.values())
    with pytest.raises(TooFewElements):
        tuple_squeeze_translates(FiniteSet([1, 2, 3]), 3, parse("exp(x)"))


def test_minimal_tuple_and_greedy():
    a = FiniteSet([0, 5, 6, 7, 20, 21, 22])
    assert minimal_tuple(a, 2) == (5, 6, 7)
    assert greedy_translates(a, 2) == [0, 5, 20]


@given(st.lists(st.integers(1, 80), min_size=3, max_size=12, unique=True), st.integers(1, 2))
def test_tuple_squeeze_elements_exact(vals, n):
    a = FiniteSet(vals)
    if len(a) < n + 1:
        return
    # increasing and convex on [-80, 80], and rational so the check is exact
    ts = tuple_squeeze_translates(a, n, parse("1 / (100 - x)"))
    for elems in ts.sets.values():
        assert all(e.check() for e in elems)


def test_tuple_squeeze_needs_fixed_convexity_across_differences():
    # x^3 has an inflection point inside [-span, span]
    with pytest.raises(PreconditionViolated):
        tuple_squeeze_translates(FiniteSet([1, 2, 3, 10]), 1, parse("x^3"))


# -- equidistribution ------------------------------------------------------------------------

def test_equidistribution_small_example():
    assert equidistribution_violations(FiniteSet([1, 2, 4, 8, 16])) == []


@given(st.lists(st.integers(-100, 100), min_size=2, max_size=14, unique=True))
def test_equidistribution_property(vals):
    assert equidistribution_violations(FiniteSet(vals)) == []


def test_convex_strategy_produces_convex_sets():
    a = FiniteSet(_integrate(_integrate(_integrate([1, 2, 3], 1), 1), 0))
    assert convexity_order(a, 3) >= 2
