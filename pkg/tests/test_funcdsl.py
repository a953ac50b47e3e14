from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from sumsetlab.errors import DomainError, ExprSyntaxError, TooManyPieces, UnknownFunction
from sumsetlab.funcdsl import (
    Add, Arctan, Const, Cos, DiscreteDerivativeSpec, Div, Exp, Interval, Log, Mul, Pow, Sin,
    Sub, Var, X, derivative, differentiate, discrete_derivative, evaluate, evaluate_exact,
    has_partial, image, monotone_partition, parse, polynomial_coefficients, render, simplify,
)
from sumsetlab.scalars import to_mpf
from sumsetlab.sets import FiniteSet

# -- strategies ---------------------------------------------------------------

consts = st.fractions(min_value=-9, max_value=9, max_denominator=7).map(Const)
leaves = st.one_of(consts, st.just(Var()))


def _extend(children):
    binary = st.tuples(st.sampled_from([Add, Sub, Mul, Div]), children, children).map(
        lambda t: t[0](t[1], t[2]))
    powers = st.tuples(children, st.integers(-3, 4)).map(lambda t: Pow(*t))
    funcs = st.tuples(st.sampled_from([Exp, Log, Sin, Cos, Arctan]), children).map(
        lambda t: t[0](t[1]))
    return st.one_of(binary, powers, funcs)


exprs = st.recursive(leaves, _extend, max_leaves=12)

# smooth and total on the whole line: no Div/Log/negative powers
total_exprs = st.recursive(
    leaves,
    lambda ch: st.one_of(
        st.tuples(st.sampled_from([Add, Sub, Mul]), ch, ch).map(lambda t: t[0](t[1], t[2])),
        st.tuples(ch, st.integers(0, 3)).map(lambda t: Pow(*t)),
        st.tuples(st.sampled_from([Sin, Cos, Arctan]), ch).map(lambda t: t[0](t[1])),
    ),
    max_leaves=8,
)

# -- parsing ---------------------------------------------------------------------


def test_parse_examples():
    assert parse("x^3") == Pow(Var(), 3)
    assert parse("arctan(exp(x))") == Arctan(Exp(Var()))


def test_parse_unbalanced_reports_offset():
    with pytest.raises(ExprSyntaxError) as info:
        parse("arctan(exp(x)")
    assert info.value.offset == 14


def test_parse_unknown_function():
    with pytest.raises(UnknownFunction) as info:
        parse("x + tan(x)")
    assert info.value.name == "tan"
    assert info.value.offset == 5


@pytest.mark.parametrize("text", ["", "   ", "x +", "2 3", "x^1.5", "x^y", "(x", "x)", "x $ 2"])
def test_parse_rejects(text):
    with pytest.raises(ExprSyntaxError):
        parse(text)


def test_precedence_and_literals():
    assert parse("1 + 2*x^2") == Add(Const(1), Mul(Const(2), Pow(X, 2)))
    assert parse("x - 1 - 2") == Sub(Sub(X, Const(1)), Const(2))
    assert parse("x^2/4") == Div(Pow(X, 2), Const(4))
    assert parse("3/4*x") == Mul(Const(Fraction(3, 4)), X)
    assert parse("3 / 4") == Div(Const(3), Const(4))
    assert parse("-2") == Const(-2)
    assert parse("-x") == Mul(Const(-1), X)
    assert parse("x^-2") == Pow(X, -2)
    assert parse("1.25") == Const(Fraction(5, 4))


@given(exprs)
def test_render_parse_round_trip(e):
    assert parse(render(e)) == e


def test_partial_flags():
    assert has_partial(parse("log(x)"))
    assert has_partial(parse("1/x"))
    assert has_partial(parse("x^-1"))
    assert not has_partial(parse("arctan(exp(x)) + x^2"))


# -- differentiation --------------------------------------------------------------


def test_derivative_examples():
    assert differentiate(parse("x^3")) == Mul(Const(3), Pow(X, 2))
    assert differentiate(parse("arctan(exp(x))")) == Div(Exp(X), Add(Const(1), Pow(Exp(X), 2)))
    assert differentiate(Const(7)) == Const(0)


@pytest.mark.parametrize("x", [Fraction(0), Fraction(1, 2), Fraction(1)])
def test_arctan_exp_derivative_against_finite_differences(x):
    f = parse("arctan(exp(x))")
    fprime = differentiate(f)
    with mpmath.workprec(256):
        numeric = mpmath.diff(lambda t: mpmath.atan(mpmath.exp(t)), to_mpf(x, 256))
        assert abs(evaluate(fprime, x, 128) - numeric) < 1e-20


def test_simplify_keeps_partial_nodes():
    zero_times_partial = Mul(Const(0), Div(Const(1), X))
    assert simplify(zero_times_partial) == zero_times_partial
    assert simplify(Mul(Const(0), Sin(X))) == Const(0)
    assert simplify(Div(X, X)) == Div(X, X)


@given(total_exprs, st.fractions(min_value=-2, max_value=2, max_denominator=8))
def test_derivative_matches_central_differences(e, x):
    # observed convergence order of the central difference quotient ~ 2
    d = differentiate(e)
    prec = 200
    with mpmath.workprec(prec):
        exact = evaluate(d, x, prec)
        errors = []
        for j in (10, 14, 18):
            h = mpmath.ldexp(1, -j)
            q = (evaluate(e, x + Fraction(1, 2 ** j), prec)
                 - evaluate(e, x - Fraction(1, 2 ** j), prec)) / (2 * h)
            errors.append(abs(q - exact))
        scale = 1 + abs(exact)
        assume(all(abs(v) < 1e12 for v in (exact, errors[0])))
        if errors[0] < 1e-40 * scale:
            return  # derivative of a quadratic or an exact cancellation
        orders = [mpmath.log(errors[i] / errors[i + 1], 2) / 4 for i in range(2)
                  if errors[i + 1] > 0]
        assert all(o >= 1.9 for o in orders), orders


@given(total_exprs)
def test_simplify_preserves_values(e):
    s = simplify(e)
    for x in (Fraction(-1, 3), Fraction(1, 2), Fraction(2)):
        a, b = evaluate(e, x, 160), evaluate(s, x, 160)
        assert abs(a - b) <= mpmath.mpf(2) ** -120 * (1 + abs(a))


def test_higher_derivative():
    assert polynomial_coefficients(derivative(parse("x^5"), 3)) == [0, 0, 60]


# -- evaluation ----------------------------------------------------------------


def test_evaluate_examples():
    assert evaluate(parse("x^2"), 3) == 9
    with pytest.raises(DomainError) as info:
        evaluate(parse("log(x)"), -1)
    assert info.value.node == "log"
    with mpmath.workprec(128):
        assert abs(evaluate(parse("arctan(exp(x))"), 0, 128) - mpmath.pi / 4) < mpmath.mpf(2) ** -125


def test_evaluate_division_by_zero():
    with pytest.raises(DomainError):
        evaluate(parse("1/(x-1)"), 1)
    with pytest.raises(DomainError):
        evaluate(parse("x^-2"), 0)


def test_evaluate_respects_precision():
    v = evaluate(parse("exp(x)"), 1, 300)
    with mpmath.workprec(320):
        assert abs(v - mpmath.e) < mpmath.mpf(2) ** -296


def test_evaluate_exact():
    assert evaluate_exact(parse("x^2/3 - 1"), Fraction(1, 2)) == Fraction(-11, 12)
    with pytest.raises(TypeError):
        evaluate_exact(parse("exp(x)"), 1)


# -- discrete derivatives ------------------------------------------------------


def test_discrete_derivative_examples():
    assert discrete_derivative(parse("x^2"), 1) == parse("2*x + 1")
    assert discrete_derivative(parse("x"), Fraction(5, 3)) == Const(Fraction(5, 3))
    with pytest.raises(ValueError):
        DiscreteDerivativeSpec(parse("x"), 0)


def test_discrete_derivative_of_exp_with_log2_shift():
    with mpmath.workprec(200):
        d = mpmath.log(2)
    dd = discrete_derivative(DiscreteDerivativeSpec(parse("exp(x)"), d))
    for x in (Fraction(-2), Fraction(-1, 2), Fraction(0), Fraction(3, 4), Fraction(2)):
        with mpmath.workprec(200):
            assert abs(evaluate(dd, x, 200) - mpmath.exp(to_mpf(x, 200))) < 1e-20


@given(total_exprs, st.fractions(min_value=-1, max_value=1, max_denominator=6),
       st.fractions(min_value=Fraction(1, 8), max_value=1, max_denominator=8))
def test_discrete_derivative_is_integral_of_derivative(e, x, d):
    dd = discrete_derivative(e, d)
    fprime = differentiate(e)
    with mpmath.workprec(96):
        lhs = evaluate(dd, x, 96)
        rhs = mpmath.quad(lambda t: evaluate(fprime, t, 96), [to_mpf(x, 96), to_mpf(x + d, 96)])
        assume(abs(rhs) < 1e8)
        assert abs(lhs - rhs) <= 1e-9 * max(1, abs(rhs))


# -- images -----------------------------------------------------------------------


def test_image_examples():
    assert list(image(parse("x^2"), FiniteSet([1, 2, 4]))) == [1, 4, 16]
    assert list(image(parse("x^2"), FiniteSet([-1, 1]))) == [1]
    img = image(parse("arctan(exp(x))"), FiniteSet([0]))
    assert img.mode == "float" and len(img) == 1
    with mpmath.workprec(128):
        assert abs(img[0] - mpmath.pi / 4) < 1e-30


def test_image_domain_error():
    with pytest.raises(DomainError):
        image(parse("log(x)"), FiniteSet([-1, 2]))


@given(st.lists(st.integers(1, 60), min_size=1, max_size=12, unique=True),
       st.sampled_from(["arctan(exp(x))", "x^3 - x", "exp(x/7)", "sin(x/40)"]))
def test_image_injective_on_single_monotone_piece(a, text):
    f = parse(text)
    a = FiniteSet(Fraction(v, 4) for v in a)
    pieces = monotone_partition(f, Interval(Fraction(1, 4), 15), samples=512)
    if len(pieces) == 1:
        assert len(image(f, a)) == len(a)


# -- monotone partitions ----------------------------------------------------------


def test_partition_parabola():
    pieces = monotone_partition(parse("x^2"), Interval(-1, 1))
    assert len(pieces) == 2
    assert abs(pieces[0].hi) < 1e-18
    assert pieces[0].lo == -1 and pieces[1].hi == 1


def test_partition_single_piece():
    assert monotone_partition(parse("x^3"), Interval(1, 2)) == [Interval(1, 2)]


def test_partition_sine():
    pieces = monotone_partition(parse("sin(x)"), Interval(0, 7))
    cuts = [p.hi for p in pieces[:-1]]
    assert len(cuts) == 4
    with mpmath.workprec(128):
        expect = [mpmath.pi / 2, mpmath.pi, 3 * mpmath.pi / 2, 2 * mpmath.pi]
        assert all(abs(c - e) < mpmath.mpf(2) ** -60 for c, e in zip(cuts, expect))


def test_partition_too_many_pieces():
    with pytest.raises(TooManyPieces):
        monotone_partition(parse("sin(x)"), Interval(0, 100), max_pieces=8)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(1, 1)
    with pytest.raises(ValueError):
        Interval("inf", 2)
    assert Interval.parse("[0, 3/2]") == Interval(0, Fraction(3, 2))
