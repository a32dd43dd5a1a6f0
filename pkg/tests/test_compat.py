from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from commonfix.compat import (ExplicitList, MobiusInInverseN, commutes_on_set, constant_sequence,
                              fixed_set_intersection, is_compatible_on, is_reciprocal_continuous_on,
                              is_weakly_compatible, sequence_limits)
from commonfix.domain import DomainSet, Interval
from commonfix.errors import InapplicableProbe
from commonfix.maps import MapPiece, PiecewiseMap, coincidence_points, make_form
from conftest import UNIT, unit_maps, unit_rationals


def test_witness_sequence_terms():
    w = MobiusInInverseN(1, F(2, 3), start_index=5)
    assert w.terms(2) == [F(2, 3) + F(1, 5), F(2, 3) + F(1, 6)]
    assert w.limit == F(2, 3)
    with pytest.raises(ValueError):
        MobiusInInverseN(1, 1, 1, 0)


def test_limits_on_34(ex34):
    T, f, w = ex34.map("T"), ex34.map("f"), ex34.witnesses["w"]
    assert tuple(sequence_limits(T, f, w)) == (F(2, 3), F(2, 3), F(1, 2), F(5, 6))
    v = is_compatible_on(T, f, w)
    assert v.falsified and v.gap == F(1, 3)
    r = is_reciprocal_continuous_on(T, f, w)
    assert r.falsified and {d[0] for d in r.discrepancies} == {"Tf", "fT"}


def test_limits_on_47_every_index(ex47):
    fam, f, w = ex47.family("T"), ex47.map("f"), ex47.witnesses["w"]
    for n in range(1, 8):
        lim = sequence_limits(fam(n), f, w)
        assert lim.as_tuple() == (F(2, 3), F(2, 3), F(1, 3) + F(1, 6 * n), 1)
        assert is_compatible_on(fam(n), f, w).falsified


def test_explicit_list_agrees_with_symbolic(ex34):
    T, f = ex34.map("T"), ex34.map("f")
    w = ExplicitList(tuple(F(2, 3) + F(1, 2 ** n) for n in range(2, 30)))
    assert tuple(sequence_limits(T, f, w)) == tuple(sequence_limits(T, f, ex34.witnesses["w"]))


def test_probe_inapplicable_when_limits_differ(ex34):
    T, f = ex34.map("T"), ex34.map("f")
    with pytest.raises(InapplicableProbe):
        is_compatible_on(T, f, constant_sequence(F(1, 2)))


@given(unit_maps("T"), unit_maps("f"), unit_rationals)
@settings(max_examples=60, deadline=None)
def test_constant_sequence_is_pointwise(T, f, z):
    lim = sequence_limits(T, f, constant_sequence(z))
    assert lim.as_tuple() == (T(z), f(z), T(f(z)), f(T(z)))


@given(unit_maps("T"), unit_maps("f"), st.lists(unit_rationals, max_size=6))
@settings(max_examples=60, deadline=None)
def test_commutes_on_points_symmetric(T, f, pts):
    a, b = commutes_on_set(T, f, pts), commutes_on_set(f, T, pts)
    assert a.ok == b.ok == all(T(f(x)) == f(T(x)) for x in pts)


def test_empty_set_vacuous():
    T = PiecewiseMap(UNIT, [MapPiece(Interval(0, 1), make_form(-1, 1))])
    assert commutes_on_set(T, T, DomainSet(())).ok
    assert commutes_on_set(T, T, []).ok


def test_weak_compatibility_examples(ex34, ex42):
    assert is_weakly_compatible(ex34.map("T"), ex34.map("f"))
    bad = is_weakly_compatible(ex42.map("T"), ex42.map("f"))
    assert not bad
    assert (bad.witness.point, bad.witness.Tf, bad.witness.fT) == (F(4, 5), F(4, 5), F(11, 16))
    assert is_weakly_compatible(ex42.map("T^2"), ex42.map("f"))


def test_weak_compatibility_mutant():
    # T = 1/2 and f = 1 - x/2 coincide only at 1, where T f(1) = 1/2 but f T(1) = 3/4
    T = PiecewiseMap(UNIT, [MapPiece(Interval(0, 1), make_form(0, F(1, 2)))])
    f = PiecewiseMap(UNIT, [MapPiece(Interval(0, 1), make_form(F(-1, 2), 1))])
    assert coincidence_points(T, f).exact == DomainSet.points([1])
    v = is_weakly_compatible(T, f)
    assert not v and (v.witness.Tf, v.witness.fT) == (F(1, 2), F(3, 4))


def test_fixed_set_intersection(ex33):
    common = fixed_set_intersection([ex33.map("T"), ex33.map("f"), ex33.map("g")])
    assert common.exact == DomainSet.points([F(2, 3)])
