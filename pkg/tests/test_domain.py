from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from commonfix.domain import (DomainSet, GeometricSeq, Interval, PointSet, closure, contains, is_complete,
                              metric_distance, sample, scalar, subset_of)
from commonfix.errors import EdgeOffsetTooLarge, UnsupportedSetOperation
from conftest import domain_sets, intervals, rationals


def image_f_34():
    return DomainSet([Interval(F(1, 3), F(2, 3), False, True), PointSet((F(5, 6),))])


# --- scalars ----------------------------------------------------------------

@pytest.mark.parametrize("text,value", [("2/3", F(2, 3)), ("-5/4", F(-5, 4)), (" 7 ", F(7)), ("4/6", F(2, 3))])
def test_scalar_parses_rationals(text, value):
    assert scalar(text) == value


@pytest.mark.parametrize("bad", ["0.5", "1e3", "1/0x", "", "abc"])
def test_scalar_rejects_decimals(bad):
    with pytest.raises(ValueError):
        scalar(bad)


def test_scalar_rejects_float():
    with pytest.raises(TypeError):
        scalar(0.5)


# --- membership, closure, completeness ----------------------------------------

def test_membership_examples():
    assert contains(image_f_34(), F(2, 3))
    assert not contains(image_f_34(), F(1, 3))
    assert contains(image_f_34(), F(5, 6))
    without_zero = DomainSet([GeometricSeq(1, F(1, 2), False)])
    assert not without_zero.contains(0)
    assert without_zero.contains(F(1, 8))
    assert not without_zero.contains(F(3, 8))


def test_closure_examples():
    two = DomainSet.points([F(1, 2), F(2, 3)])
    assert closure(two) == two
    assert closure(image_f_34()) == DomainSet([Interval(F(1, 3), F(2, 3)), PointSet((F(5, 6),))])
    g = DomainSet([GeometricSeq(F(1, 4), F(1, 2), False)])
    assert closure(g) == DomainSet([GeometricSeq(F(1, 4), F(1, 2), True)])


def test_completeness_examples():
    assert is_complete(image_f_34()) == (False, F(1, 3))
    t_of_x = DomainSet([GeometricSeq(F(1, 4), F(1, 2), False)])
    assert is_complete(t_of_x) == (False, 0)
    assert is_complete(DomainSet([GeometricSeq(1, F(1, 2), True)]))[0]
    assert is_complete(DomainSet.interval(0, None, True, False))[0]


def test_subset_examples():
    assert subset_of(DomainSet.interval(F(1, 2), F(2, 3)), image_f_34()) == (True, None)
    ok, w = subset_of(DomainSet.interval(F(1, 4), F(1, 2)), image_f_34())
    assert not ok and not image_f_34().contains(w) and F(1, 4) <= w <= F(1, 2)


def test_point_absorbed_into_interval():
    s = DomainSet([Interval(0, 1, False, False), PointSet((F(1),))])
    assert s == DomainSet([Interval(0, 1, False, True)])


def test_degenerate_interval_rejected():
    with pytest.raises(ValueError):
        Interval(1, 1, False, True)
    with pytest.raises(ValueError):
        Interval(2, 1)


# --- sampling -------------------------------------------------------------------

def test_sample_avoids_open_endpoints():
    s = sample(DomainSet.interval(F(1, 3), 1, False, False), resolution=8)
    assert F(1, 3) not in s.points and 1 not in s.points
    assert min(s.points) == F(1, 3) + F(2, 3) / 1000
    assert len(s) == 10


def test_sample_breakpoints_and_offsets():
    s = sample(DomainSet.interval(0, 1), resolution=4, breakpoints=[F(1, 2)])
    assert {F(1, 2) - F(1, 1000), F(1, 2), F(1, 2) + F(1, 1000)} <= set(s.points)


def test_edge_offset_too_large():
    with pytest.raises(EdgeOffsetTooLarge):
        sample(DomainSet.interval(0, 1), edge_offset=F(1, 2))


def test_unbounded_sample_unsupported():
    with pytest.raises(UnsupportedSetOperation):
        sample(DomainSet.interval(0, None, True, False))


# --- invariants -------------------------------------------------------------------

@given(rationals(), rationals(), rationals())
def test_metric_axioms(x, y, z):
    assert metric_distance(x, y) >= 0
    assert (metric_distance(x, y) == 0) == (x == y)
    assert metric_distance(x, y) == metric_distance(y, x)
    assert metric_distance(x, z) <= metric_distance(x, y) + metric_distance(y, z)


@given(domain_sets())
def test_closure_idempotent_and_contains(S):
    c = closure(S)
    assert closure(c) == c
    assert subset_of(S, c)[0]
    assert is_complete(c)[0]


@given(domain_sets(), domain_sets(), domain_sets())
@settings(max_examples=60)
def test_subset_reflexive_transitive(A, B, C):
    assert subset_of(A, A)[0]
    if subset_of(A, B)[0] and subset_of(B, C)[0]:
        assert subset_of(A, C)[0]


@given(domain_sets(), domain_sets(), rationals())
def test_union_intersection_membership(A, B, x):
    assert A.union(B).contains(x) == (A.contains(x) or B.contains(x))
    assert A.intersect(B).contains(x) == (A.contains(x) and B.contains(x))


@given(domain_sets(), domain_sets())
def test_subset_witness_is_outside(A, B):
    ok, w = subset_of(A, B)
    if not ok:
        assert A.contains(w) and not B.contains(w)


@given(domain_sets(), st.integers(1, 12))
def test_sample_is_inside(S, res):
    if any(not iv.bounded for iv in S.intervals):
        return
    assert all(S.contains(p) for p in sample(S, res).points)


@given(intervals(), rationals())
def test_interval_closure_contains(iv, x):
    if iv.contains(x):
        assert iv.closure().contains(x)


@given(st.integers(1, 20), st.integers(2, 9), st.integers(0, 30))
def test_geometric_terms_members(base_num, ratio_den, k):
    g = GeometricSeq(F(base_num, 3), F(1, ratio_den), False)
    S = DomainSet([g])
    assert S.contains(g.term(k))
    assert not S.contains(g.limit)
    assert is_complete(S) == (False, g.limit)
