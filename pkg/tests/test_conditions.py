from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from commonfix.conditions import (BabuMax, BabuTriple, BoydWong, FamilyTwoMap, IteratedTwoMap, Jungck, Main,
                                  MinSong, Singh, Som, TwoMapMax, check_condition, implication_probe,
                                  pair_values, rhs_bound, symmetry_audit, worst_ratio)
from commonfix.control import linear
from commonfix.domain import DomainSet, Interval, sample
from commonfix.errors import AllKernelsZero
from commonfix.maps import MapPiece, PiecewiseMap, make_form, sample_for_maps
from conftest import UNIT, unit_maps

PSI = linear(F(2, 3))
HALF = linear(F(1, 2))


def test_main_rhs_on_example(ex33):
    T, f, g = ex33.map("T"), ex33.map("f"), ex33.map("g")
    p = pair_values(F(1, 2), F(4, 5), T, f, g)
    assert p.lhs == F(1, 6)
    assert rhs_bound(Main(PSI), F(1, 2), F(4, 5), T, f, g) == F(2, 9)


def test_main_holds_on_example(ex33):
    T, f, g = ex33.map("T"), ex33.map("f"), ex33.map("g")
    rep = check_condition(Main(PSI), T, f, g, sample_for_maps(ex33.working, [T, f, g], 64))
    assert rep.holds and rep.pairs_checked >= 4000 and rep.min_margin >= 0


def test_jungck_quantities_on_example(ex34):
    T, f = ex34.map("T"), ex34.map("f")
    p = pair_values(F(2, 3), F(1, 2), T, f, f)
    assert p.lhs == F(1, 6) and abs(p.fx - p.fy) == F(1, 6)
    assert rhs_bound(Jungck(F(1, 2)), F(2, 3), F(1, 2), T, f) == F(1, 12)


def test_two_map_max_holds_on_34(ex34):
    assert check_condition(TwoMapMax(HALF), ex34.map("T"), ex34.map("f")).holds


def test_two_map_max_fails_on_42(ex42):
    T, f = ex42.map("T"), ex42.map("f")
    rep = check_condition(TwoMapMax(HALF), T, f)
    assert not rep.holds
    hit = [v for v in rep.violations if (v.x, v.y) == (1, F(1, 3))]
    assert hit and hit[0].lhs == 2 and hit[0].kernel == F(17, 12) and hit[0].rhs == F(17, 24)
    p = pair_values(1, F(1, 3), T, f, f)
    assert (abs(p.fx - p.fy), abs(p.Tx - p.fx), abs(p.Ty - p.fy)) == (F(5, 6), 0, F(7, 6))
    assert (abs(p.Tx - p.fy) + abs(p.Ty - p.fx)) / 2 == F(17, 12)


def test_iterated_condition_on_42(ex42):
    T, f = ex42.map("T"), ex42.map("f")
    samples = sample_for_maps(ex42.working, [ex42.map("T^2"), f])
    assert check_condition(IteratedTwoMap(linear(F(4, 5)), 2), T, f, None, samples).holds


def test_iterated_condition_fails_on_44(ex44):
    rep = check_condition(IteratedTwoMap(linear(F(2, 3)), 2), ex44.map("T"), ex44.map("f"))
    assert not rep.holds
    v = rep.violation_witness
    assert v.lhs == F(3, 2) and v.rhs == 1


def test_family_condition_on_47(ex47):
    fam = ex47.family("T")
    rep = check_condition(FamilyTwoMap(HALF), fam(1), ex47.map("f"), family=fam, indices=range(1, 6))
    assert rep.holds


def test_worst_ratio_examples(ex34):
    T, f = ex34.map("T"), ex34.map("f")
    for cond in (Jungck(F(1, 2)), BabuTriple(F(1, 2))):
        w = worst_ratio(cond, T, f)
        assert w.sup_ratio == 1 and w.witness[0] == F(2, 3)
        assert F(1, 3) < w.witness[1] < F(2, 3)
        assert not w.admissible


def test_all_kernels_zero():
    const = PiecewiseMap(UNIT, [MapPiece(Interval(0, 1), make_form(0, F(1, 2)))])
    with pytest.raises(AllKernelsZero):
        worst_ratio(Jungck(F(1, 2)), const, const)


def test_coefficient_validation():
    with pytest.raises(ValueError):
        Jungck(F(1))
    with pytest.raises(ValueError):
        Som(F(1, 2), F(1, 2), 0, 0, 0)


def test_symmetry_audit(ex33):
    T, f, g = ex33.map("T"), ex33.map("f"), ex33.map("g")
    assert symmetry_audit(Main(PSI), T, f, g).symmetric
    rep = symmetry_audit(BoydWong(ex33.controls["phi"]), T, f, g)
    assert not rep.symmetric
    x, y, a, b = rep.asymmetric_pairs[0]
    assert rhs_bound(BoydWong(ex33.controls["phi"]), x, y, T, f, g) == a != b


def test_min_song_uses_own_side(ex33):
    T, f, g = ex33.map("T"), ex33.map("f"), ex33.map("g")
    p = pair_values(F(1, 2), F(4, 5), T, f, g)
    assert MinSong(F(1, 2)).kernel(p) >= 0


@given(unit_maps("T"), unit_maps("f"))
@settings(max_examples=30, deadline=None)
def test_jungck_implies_two_map_max(T, f):
    samples = sample(UNIT, 8, breakpoints=T.breakpoints() + f.breakpoints())
    rep = implication_probe(Jungck(F(1, 2)), TwoMapMax(HALF), T, f, None, samples)
    assert rep.holds


@given(unit_maps("T"), unit_maps("f"), unit_maps("g"))
@settings(max_examples=30, deadline=None)
def test_main_rhs_symmetric(T, f, g):
    assert symmetry_audit(Main(PSI), T, f, g, sample(UNIT, 6)).symmetric


@given(unit_maps("T"), unit_maps("f"))
@settings(max_examples=30, deadline=None)
def test_scaled_variants_bounded_by_worst_ratio(T, f):
    samples = sample(UNIT, 6)
    for cond in (Jungck(F(1, 2)), BabuMax(F(1, 2)), Singh(F(1, 8), F(1, 8), F(1, 8))):
        try:
            w = worst_ratio(cond, T, f, None, samples)
        except AllKernelsZero:
            continue
        holds = check_condition(cond, T, f, None, samples).holds
        if holds:
            assert not w.infinite_witnesses
