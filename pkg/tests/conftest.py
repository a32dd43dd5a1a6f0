from fractions import Fraction

import pytest
from hypothesis import strategies as st

from commonfix.control import CFPiece, ControlFunction
from commonfix.corpus import load_fixture
from commonfix.domain import DomainSet, Interval, PointSet
from commonfix.maps import Constant, MapPiece, Mobius, PiecewiseMap, make_form

F = Fraction
UNIT = DomainSet.interval(0, 1)


def rationals(lo=-4, hi=4, max_den=24):
    return st.builds(lambda n, d: F(n, d), st.integers(lo * max_den, hi * max_den),
                     st.integers(1, max_den)).filter(lambda q: lo <= q <= hi)


unit_rationals = rationals(0, 1, 16)


@st.composite
def intervals(draw, lo=-4, hi=4):
    a, b = sorted([draw(rationals(lo, hi)), draw(rationals(lo, hi))])
    if a == b:
        return Interval.point(a)
    return Interval(a, b, draw(st.booleans()), draw(st.booleans()))


@st.composite
def domain_sets(draw, lo=-4, hi=4):
    comps = draw(st.lists(intervals(lo, hi), max_size=3))
    pts = draw(st.lists(rationals(lo, hi), max_size=3))
    if pts:
        comps.append(PointSet(tuple(pts)))
    return DomainSet(comps)


@st.composite
def unit_maps(draw, name="m", max_pieces=4):
    """Total piecewise constant/affine self-map of [0, 1]."""
    cuts = sorted(set(draw(st.lists(unit_rationals.filter(lambda q: 0 < q < 1), max_size=max_pieces - 1))))
    ends = [F(0)] + cuts + [F(1)]
    pieces = []
    for i, (a, b) in enumerate(zip(ends, ends[1:])):
        last = i == len(ends) - 2
        guard = Interval(a, b, True, last)
        if draw(st.booleans()):
            form = make_form(0, draw(unit_rationals))
        else:
            va, vb = draw(unit_rationals), draw(unit_rationals)
            slope = (vb - va) / (b - a)
            form = make_form(slope, va - slope * a)
        pieces.append(MapPiece(guard, form))
    return PiecewiseMap(UNIT, pieces, name=name)


def usc_phi(cuts, slopes):
    """Piecewise t -> s_i t with slopes s_i < 1; each cut takes the larger side, so phi is usc."""
    ends = [F(0)] + sorted(set(cuts))
    assert len(slopes) == len(ends)
    pieces = [CFPiece(Interval(0, 0), Constant(0))]
    for i, a in enumerate(ends):
        b = ends[i + 1] if i + 1 < len(ends) else None
        s = slopes[i]
        pieces.append(CFPiece(Interval(a, b, False, False), Constant(0) if s == 0 else Mobius(s, 0)))
        if b is not None:
            pieces.append(CFPiece(Interval(b, b), Constant(max(s, slopes[i + 1]) * b)))
    return ControlFunction(tuple(pieces), upper_semicontinuous=True)


@pytest.fixture(scope="session")
def ex33():
    return load_fixture("ex3_3")


@pytest.fixture(scope="session")
def ex34():
    return load_fixture("ex3_4")


@pytest.fixture(scope="session")
def ex38():
    return load_fixture("ex3_8")


@pytest.fixture(scope="session")
def ex42():
    return load_fixture("ex4_2")


@pytest.fixture(scope="session")
def ex44():
    return load_fixture("ex4_4")


@pytest.fixture(scope="session")
def ex47():
    return load_fixture("ex4_7")
