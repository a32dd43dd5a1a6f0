from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from commonfix.domain import DomainSet, Interval, PointSet, sample
from commonfix.errors import ImageEscapesDomain, NoPreimage, OutOfDomain, PoleInGuard, TotalityError
from commonfix.maps import (Constant, MapPiece, Mobius, PiecewiseMap, coincidence_points, compose, compose_forms,
                            fixed_points, iterate_map, make_form, sample_for_maps)
from conftest import UNIT, rationals, unit_maps, unit_rationals


# --- forms ------------------------------------------------------------------------

def test_form_normalization():
    assert make_form(0, 3) == Constant(3)
    assert make_form(2, 4, 2, 2) == Mobius(1, 2, 1, 1)
    assert make_form(1, 1, 1, 1) == Constant(1)


def test_mobius_inverse_and_pole():
    m = Mobius(0, 1, 1, 0)
    assert m.pole == 0 and m.inverse()(m(F(3))) == 3
    with pytest.raises(PoleInGuard):
        m(F(0))


@given(rationals(), rationals(), rationals(), rationals(), rationals(), rationals(), rationals())
def test_compose_forms_is_composition(a, b, c, p, q, r, x):
    outer, inner = make_form(a, b), make_form(p, q, r, 1)
    if inner.pole == x:
        return
    y = inner(x)
    if outer.pole == y:
        return
    assert compose_forms(outer, inner)(x) == outer(y)


# --- evaluation and images, on the worked examples ------------------------------------

def test_evaluate_examples(ex33, ex42):
    assert ex33.map("f")(F(2, 3)) == F(2, 3)
    assert ex33.map("g")(F(4, 5)) == F(1, 2)
    assert ex42.map("T")(1) == 1
    with pytest.raises(OutOfDomain):
        ex33.map("T")(F(1, 3))


def test_image_examples(ex33, ex34):
    assert ex34.map("T").image() == DomainSet.interval(F(1, 2), F(2, 3))
    assert ex33.map("g").image() == DomainSet.points([F(1, 2), F(2, 3), F(5, 6)])
    assert ex33.map("T").image() == DomainSet.points([F(1, 2), F(2, 3)])


def test_compose_example_42(ex42):
    T2 = compose(ex42.map("T"), ex42.map("T"))
    assert T2(F(1, 3)) == 1  # T(1/3) = 3 and T(3) = 1
    assert T2(F(1)) == 1 and T2(F(4, 5)) == F(4, 5)
    ident = [p for p in T2.pieces if isinstance(p.form, Mobius) and p.form.is_identity]
    assert [p.guard for p in ident] == [Interval(F(15, 23), F(23, 15))]


def test_iterates_example_44(ex44):
    T = ex44.map("T")
    T2, T3, T4 = (iterate_map(T, k) for k in (2, 3, 4))
    assert T2(F(1, 2)) == F(1, 2) and T2(F(1)) == 1 and T2(F(3, 2)) == 2
    assert T3(F(1, 2)) == 2 and T3(F(3, 2)) == F(1, 2)
    assert all(T4(x) == T2(x) for x in sample(ex44.working, 32).points)


def test_fixed_and_coincidence_examples(ex42, ex34):
    assert fixed_points(ex42.map("T^2")) == DomainSet.interval(F(15, 23), F(23, 15))
    J = DomainSet.interval(F(1, 3), F(23, 15))
    assert coincidence_points(ex42.map("T"), ex42.map("f"), within=J) == DomainSet.points([F(4, 5), 1])
    assert coincidence_points(ex34.map("T"), ex34.map("f")) == DomainSet.points([F(2, 3)])


def test_irrational_fixed_point():
    m = PiecewiseMap(DomainSet.interval(1, 2), [MapPiece(Interval(1, 2), make_form(1, 2, 1, 1))], name="m")
    fp = fixed_points(m)  # (x + 2)/(x + 1) = x  =>  x = sqrt(2)
    assert fp.exact.is_empty() and len(fp.inexact) == 1
    assert abs(fp.inexact[0].approx() - 2 ** 0.5) < 1e-12


def test_preimage_examples(ex34, ex33):
    pre = ex34.map("f").preimages(F(2, 3))
    assert [p.point for p in pre] == [F(2, 3)] and pre[0].continuum is None
    (cont,) = ex33.map("g").preimages(F(1, 2))
    assert cont.continuum == DomainSet.interval(F(2, 3), 1, False, False)
    with pytest.raises(NoPreimage):
        ex34.map("f").preimages(F(9, 10))


# --- construction errors -----------------------------------------------------------

def test_gap_and_overlap_rejected():
    with pytest.raises(TotalityError) as gap:
        PiecewiseMap(UNIT, [MapPiece(Interval(0, F(1, 2), True, False), Constant(0)),
                            MapPiece(Interval(F(1, 2), 1, False, True), Constant(0))])
    assert gap.value.witness == F(1, 2)
    with pytest.raises(TotalityError):
        PiecewiseMap(UNIT, [MapPiece(Interval(0, F(1, 2)), Constant(0)), MapPiece(Interval(F(1, 2), 1), Constant(0))])


def test_pole_and_escape_rejected():
    with pytest.raises(PoleInGuard):
        PiecewiseMap(UNIT, [MapPiece(Interval(0, 1), Mobius(0, 1, 1, 0))])
    with pytest.raises(ImageEscapesDomain):
        PiecewiseMap(UNIT, [MapPiece(Interval(0, 1), make_form(2, 0))])


# --- invariants ---------------------------------------------------------------------

@given(unit_maps(), unit_maps())
@settings(max_examples=60)
def test_compose_matches_pointwise(m1, m2):
    c = compose(m1, m2)
    for x in sample(UNIT, 16, breakpoints=m2.breakpoints()).points:
        assert c(x) == m1(m2(x))


@given(unit_maps(), unit_rationals)
@settings(max_examples=80)
def test_preimages_map_to_target(m, x):
    y = m(x)
    pre = m.preimages(y)
    assert any(p.point == x or (p.continuum is not None and p.continuum.contains(x)) for p in pre)
    for p in pre:
        assert m(p.point) == y


@given(unit_maps())
@settings(max_examples=60)
def test_fixed_points_oracle(m):
    fp = fixed_points(m)
    for x in sample_for_maps(UNIT, [m], 24).points:
        assert fp.contains(x) == (m(x) == x)


@given(unit_maps(), st.integers(2, 4))
@settings(max_examples=40)
def test_fixed_points_of_iterate_contain_fixed_points(m, k):
    fp, fpk = fixed_points(m), fixed_points(iterate_map(m, k))
    assert fp.subset_of(fpk)


@given(unit_maps(), unit_rationals)
def test_image_contains_values(m, x):
    assert m.image().contains(m(x))


@given(unit_maps(), unit_maps())
@settings(max_examples=40)
def test_coincidence_oracle(m1, m2):
    C = coincidence_points(m1, m2)
    for x in sample_for_maps(UNIT, [m1, m2], 16).points:
        assert C.contains(x) == (m1(x) == m2(x))
