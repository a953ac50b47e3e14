import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumsetlab.angles import angle_growth_report, angle_reduction_check, pinned_angles
from sumsetlab.errors import DomainError, PreconditionViolated
from sumsetlab.sets import FiniteSet


def float_angle_count(vals):
    """Double-precision oracle: distinct angles at the origin, clustered at 1e-9."""
    dirs = sorted({math.atan2(y, x) for x in vals for y in vals})
    merged = [d for i, d in enumerate(dirs) if i == 0 or d - dirs[i - 1] > 1e-9]
    gaps = sorted(b - a for i, a in enumerate(merged) for b in merged[i + 1:])
    out = [g for i, g in enumerate(gaps) if i == 0 or g - gaps[i - 1] > 1e-9]
    return len(out)


def test_pinned_angles_example():
    r = pinned_angles(FiniteSet([1, 2]))
    assert r.direction_count == 3
    got = list(r.angles)
    with mpmath.workprec(128):
        want = sorted([mpmath.atan(mpmath.mpf(1) / 3), mpmath.atan(mpmath.mpf(3) / 4)])
        assert len(got) == 2
        assert all(abs(g - w) < mpmath.mpf(10) ** -30 for g, w in zip(got, want))


def test_singleton_has_no_angles():
    r = pinned_angles(FiniteSet([1]))
    assert r.direction_count == 1 and len(r.angles) == 0
    assert angle_growth_report(FiniteSet([1])).count == 0


def test_pinned_angles_rejects_bad_input():
    with pytest.raises(DomainError):
        pinned_angles(FiniteSet([0, 1]))
    with pytest.raises(DomainError):
        pinned_angles(FiniteSet([-1, 2]))
    with pytest.raises(PreconditionViolated):
        pinned_angles(FiniteSet([1, 2]), tolerance=0)
    with pytest.raises(PreconditionViolated):
        pinned_angles(FiniteSet([1, 2]), precision_bits=32)


def test_angle_growth_examples():
    a = FiniteSet([1, 2])
    assert angle_growth_report(a, (1, 0)).count == 2
    assert angle_growth_report(a, (1, 1)).count == 3
    rec = angle_growth_report(FiniteSet([1, 2, 4]), (1, 1)).to_dict()
    assert rec["n"] == 3 and rec["spec"] == "1,1"


small_sets = st.lists(st.integers(1, 12), min_size=1, max_size=5, unique=True)


@settings(max_examples=40, deadline=None)
@given(small_sets)
def test_angle_count_matches_float_oracle(vals):
    assert len(pinned_angles(FiniteSet(vals)).angles) == float_angle_count(vals)


@settings(max_examples=25, deadline=None)
@given(small_sets, st.fractions(min_value=Fraction(1, 7), max_value=9, max_denominator=7))
def test_angles_scale_invariant(vals, c):
    a = FiniteSet(vals)
    base = list(pinned_angles(a).angles)
    scaled = list(pinned_angles(a.affine(c, 0)).angles)
    assert len(base) == len(scaled)
    tol = mpmath.mpf(2) ** -60
    assert all(abs(u - v) < tol for u, v in zip(base, scaled))


@settings(max_examples=25, deadline=None)
@given(small_sets)
def test_angles_in_open_quarter_turn(vals):
    # both points lie in the open first quadrant
    with mpmath.workprec(128):
        half_pi = mpmath.pi / 2
    assert all(0 < v < half_pi for v in pinned_angles(FiniteSet(vals)).angles)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=2, max_size=6, unique=True))
def test_reduction_identity_holds(vals):
    assert angle_reduction_check(FiniteSet(vals))


def test_reduction_check_needs_two_elements():
    with pytest.raises(PreconditionViolated):
        angle_reduction_check(FiniteSet([3]))


def test_pinned_angles_serialize():
    d = pinned_angles(FiniteSet([1, 2])).to_dict()
    assert d["angle_count"] == 2 and d["direction_count"] == 3
    assert d["angles"][0].startswith("0.3217505543966421934014046")
