import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumsetlab.errors import DegreeTooLow, EmptyDomain, PreconditionViolated
from sumsetlab.funcdsl import Interval, derivative, discrete_derivative, parse, polynomial
from sumsetlab.independence import (
    EXACT_RANK, NUMERIC_DEPENDENCE, WRONSKIAN, DeltaFamilySpec, FunctionFamily,
    arctan_wronskian_closed_form, chebyshev_points, default_threshold,
    delta_family_independence, exact_det, exact_rank, is_k_independent,
    polynomial_delta_independence, wronskian,
)


def fam(*members, interval=(-1, 1)):
    return FunctionFamily([parse(m) for m in members], Interval(*interval))


# -- exact linear algebra --------------------------------------------------------------

def test_exact_rank_and_det():
    assert exact_rank([[1, 2], [2, 4]]) == 1
    assert exact_rank([[1, 0], [0, 1], [1, 1]]) == 2
    assert exact_det([[2, 1], [1, 3]]) == 5
    assert exact_det([[Fraction(1, 2), 1], [1, 2]]) == 0


@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_exact_det_matches_cofactor_expansion(m):
    (a, b, c), (d, e, f), (g, h, i) = m
    expected = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    assert exact_det(m) == expected
    assert (exact_rank(m) == 3) == (expected != 0)


# -- Wronskians ----------------------------------------------------------------------

def test_wronskian_examples():
    with mpmath.workprec(128):
        assert abs(wronskian(["sin(x)", "cos(x)"], mpmath.mpf("0.3")) + 1) < mpmath.mpf(2) ** -100
    assert wronskian(["1", "x"], 2) == 1
    assert wronskian(["x", "2*x"], 5) == 0


members = st.sampled_from(["x", "x^2", "x^3", "exp(x)", "sin(x)", "cos(x)", "arctan(x)",
                           "exp(2*x)", "1"])


@given(st.lists(members, min_size=2, max_size=4, unique=True),
       st.fractions(min_value=-1, max_value=1, max_denominator=16), st.data())
def test_wronskian_alternates_under_swaps(fs, x, data):
    i, j = data.draw(st.lists(st.integers(0, len(fs) - 1), min_size=2, max_size=2, unique=True))
    swapped = list(fs)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    with mpmath.workprec(128):
        w, ws = wronskian(fs, x), wronskian(swapped, x)
        assert abs(w + ws) <= mpmath.mpf(2) ** -90 * max(1, abs(w))


@given(st.lists(members, min_size=1, max_size=3, unique=True),
       st.fractions(min_value=-1, max_value=1, max_denominator=16))
def test_wronskian_with_zero_member_vanishes(fs, x):
    assert wronskian(fs + ["0"], x) == 0


def test_chebyshev_points_inside_interval():
    pts = chebyshev_points(Interval(2, 5), 9)
    assert all(2 < p < 5 for p in pts)
    assert pts == sorted(pts)


# -- k-independence ------------------------------------------------------------------

def test_is_k_independent_examples():
    v = is_k_independent(fam("x^2", "x^3"), 1)
    assert v.independent is True and v.method == EXACT_RANK
    assert is_k_independent(fam("x", "x^2"), 2).independent is False
    v = is_k_independent(fam("sin(x)", "cos(x)"), 3)
    assert v.independent is True and v.method == WRONSKIAN
    v = is_k_independent(fam("exp(x)", "2*exp(x)"), 0)
    assert v.independent is False and v.method == NUMERIC_DEPENDENCE
    assert v.coefficients is not None


def test_threshold_scales_with_precision():
    assert default_threshold(128) == mpmath.mpf(2) ** -32
    assert default_threshold(256) == mpmath.mpf(2) ** -64


def test_verdict_serializes():
    d = is_k_independent(fam("sin(x)", "cos(x)"), 0).to_dict()
    assert d["independent"] is True and d["method"] == WRONSKIAN


polys = st.lists(st.integers(-4, 4), min_size=1, max_size=6)


@given(st.lists(polys, min_size=1, max_size=3), st.integers(1, 4))
def test_k_independent_implies_k_minus_1(coeff_lists, k):
    family = FunctionFamily([polynomial(c) for c in coeff_lists], Interval(-1, 1))
    if is_k_independent(family, k, samples=8).independent:
        assert is_k_independent(family, k - 1, samples=8).independent


@pytest.mark.parametrize("members,k", [(("exp(x)", "exp(2*x)"), 1),
                                       (("sin(x)", "cos(x)"), 2),
                                       (("arctan(x)", "x^3"), 1)])
def test_k_to_k_minus_1_analytic(members, k):
    for j in range(k, -1, -1):
        assert is_k_independent(fam(*members), j, samples=16).independent is True


# -- polynomial discrete derivatives -------------------------------------------------

def test_polynomial_delta_examples():
    v = polynomial_delta_independence([0, 0, 0, 1], [2, 3])
    assert v.independent is True and v.minor_determinant == 6
    with pytest.raises(PreconditionViolated):
        polynomial_delta_independence([0, 0, 0, 1], [1, 1])
    with pytest.raises(PreconditionViolated):
        polynomial_delta_independence([0, 0, 0, 1], [0, 1])
    with pytest.raises(DegreeTooLow):
        polynomial_delta_independence([0, 0, 1], [1, 2])
    low = polynomial_delta_independence([0, 0, 1], [1, 2], allow_low_degree=True)
    assert low.independent is False


@given(st.integers(3, 8), st.lists(st.fractions(min_value=Fraction(1, 4), max_value=5,
                                                max_denominator=4),
                                   min_size=1, max_size=4, unique=True), st.data())
def test_vandermonde_minor_matches_exact_det(m, shifts, data):
    n = len(shifts)
    if m < n + 1:
        return
    coeffs = data.draw(st.lists(st.integers(-5, 5), min_size=m, max_size=m)) + [1]
    v = polynomial_delta_independence(coeffs, shifts)
    rows = [[d ** r for d in shifts] for r in range(1, n + 1)]
    assert abs(v.minor_determinant) == abs(exact_det(rows))
    assert v.independent is True


def _numeric_verdict(coeffs, shifts, prec=128):
    fprime = derivative(polynomial(coeffs), 1)
    fs = [discrete_derivative(fprime, d) for d in shifts]
    with mpmath.workprec(prec):
        best = max(abs(wronskian(fs, x, prec)) for x in chebyshev_points(Interval(-1, 1), 24, prec))
    return best > default_threshold(prec)


def test_exact_and_numeric_verdicts_agree():
    rng = random.Random(11)
    for _ in range(40):
        m = rng.randint(2, 8)
        n = rng.randint(1, 4)
        coeffs = [rng.randint(-6, 6) for _ in range(m)] + [rng.choice([-3, -1, 1, 2])]
        shifts = rng.sample([Fraction(p, q) for p in range(1, 9) for q in (1, 2, 3)], n)
        exact = polynomial_delta_independence(coeffs, shifts, allow_low_degree=True)
        assert exact.independent == _numeric_verdict(coeffs, shifts)


# -- the arctan(e^x) family -----------------------------------------------------------

def _numeric_arctan_wronskian(ds, x, prec=128):
    fprime = derivative(parse("arctan(exp(x))"), 1)
    fs = [discrete_derivative(fprime, d) for d in ds]
    return wronskian(fs, x, prec)


@pytest.mark.parametrize("ds,x", [((Fraction(1, 2), 1, 2), Fraction(1, 3)),
                                  ((Fraction(1, 10), Fraction(3, 10), Fraction(7, 5)), -1),
                                  ((1, 2, 3), 0)])
def test_arctan_closed_form_matches_numeric(ds, x):
    with mpmath.workprec(128):
        closed = arctan_wronskian_closed_form(*ds, x)
        numeric = _numeric_arctan_wronskian(ds, x)
        assert abs(closed - numeric) <= mpmath.mpf(10) ** -25 * abs(numeric)


def test_arctan_printed_formula_differs():
    with mpmath.workprec(128):
        printed = arctan_wronskian_closed_form(1, 2, 3, Fraction(1, 2), printed=True)
        numeric = _numeric_arctan_wronskian((1, 2, 3), Fraction(1, 2))
        assert abs(printed - numeric) > mpmath.mpf(10) ** -3 * abs(numeric)


@pytest.mark.parametrize("ds", [(1, 1, 2), (0, 1, 2), (2, 3, 2)])
def test_arctan_closed_form_degenerate_is_zero(ds):
    assert arctan_wronskian_closed_form(*ds, Fraction(1, 3)) == 0


# -- discrete-derivative families ------------------------------------------------------

def test_delta_family_spec_validation():
    with pytest.raises(PreconditionViolated):
        DeltaFamilySpec(parse("x^3"), (1, 1))
    with pytest.raises(PreconditionViolated):
        DeltaFamilySpec(parse("x^3"), (0, 1))
    spec = DeltaFamilySpec(parse("x^3"), (1, 2))
    with pytest.raises(EmptyDomain):
        spec.domain(Interval(0, 2))
    assert spec.domain(Interval(0, 5)) == Interval(0, 3)


def test_delta_family_examples():
    cube = DeltaFamilySpec(parse("x^3"), (1,))
    assert delta_family_independence(cube, Interval(-3, 3)).independent is True
    square = DeltaFamilySpec(parse("x^2"), (1, 2))
    assert delta_family_independence(square, Interval(-3, 3)).independent is False
    arctan = DeltaFamilySpec(parse("arctan(exp(x))"), (1, 2, 3))
    v = delta_family_independence(arctan, Interval(-2, 2), samples=16)
    assert v.independent is True and v.method == WRONSKIAN
