"""Compatibility, weak compatibility and reciprocal continuity of map pairs.

A single witness sequence can refute compatibility but never establish it,
so sequence-based verdicts are `Falsified` or `NotFalsified`.

Sequences of the form x_n = (a u + b) / (c u + d) with u = 1/n are handled
symbolically: pushing one through a Möbius piece gives another Möbius form
in u, so every composite limit and its approach side are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .domain import DomainSet, GeometricSeq, Interval, PointSet, scalar
from .errors import InapplicableProbe, OutOfDomain, PieceOscillation
from .maps import (
    Constant,
    Form,
    PiecewiseMap,
    RootSet,
    coincidence_points,
    compose_forms,
    fixed_points,
    make_form,
)

FALSIFIED = "Falsified"
NOT_FALSIFIED = "NotFalsified"


@dataclass(frozen=True)
class MobiusInInverseN:
    """x_n = (a/n + b) / (c/n + d) for n >= start_index."""

    a: Fraction
    b: Fraction
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(1)
    start_index: int = 1

    kind = "mobius_in_inv_n"

    def __post_init__(self):
        for n in "abcd":
            object.__setattr__(self, n, scalar(getattr(self, n)))
        if self.d == 0:
            raise ValueError("sequence has no finite limit (d = 0)")

    @property
    def form(self) -> Form:
        return make_form(self.a, self.b, self.c, self.d)

    @property
    def limit(self) -> Fraction:
        return self.b / self.d

    def term(self, n: int) -> Fraction:
        u = Fraction(1, n)
        return (self.a * u + self.b) / (self.c * u + self.d)

    def terms(self, count: int) -> List[Fraction]:
        return [self.term(n) for n in range(self.start_index, self.start_index + count)]


@dataclass(frozen=True)
class ExplicitList:
    points: Tuple[Fraction, ...]
    start_index: int = 1

    kind = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(scalar(p) for p in self.points))


WitnessSequence = Union[MobiusInInverseN, ExplicitList]


def constant_sequence(z) -> MobiusInInverseN:
    return MobiusInInverseN(0, scalar(z), 0, 1)


@dataclass(frozen=True)
class SequenceLimits:
    lim_T: Optional[Fraction]
    lim_f: Optional[Fraction]
    lim_Tf: Optional[Fraction]
    lim_fT: Optional[Fraction]

    def as_tuple(self):
        return (self.lim_T, self.lim_f, self.lim_Tf, self.lim_fT)

    def __iter__(self):
        return iter(self.as_tuple())


# ---------------------------------------------------------- symbolic limits

def _push(m: PiecewiseMap, state: Form) -> Form:
    """Apply m to a sequence given as a form in u = 1/n, as u -> 0+."""
    if isinstance(state, Constant):
        v = state.c
        if not m.domain.contains(v):
            raise OutOfDomain(v, m.name)
        return Constant(m(v))
    if state.d == 0:
        raise PieceOscillation("sequence diverges")
    L = state.b / state.d
    from_right = state.increasing  # increasing in u means x_n decreases to L
    for p in m.pieces:
        g = p.guard
        if (g.has_right_nbhd(L) if from_right else g.has_left_nbhd(L)):
            return compose_forms(p.form, state)
    side = "right" if from_right else "left"
    raise PieceOscillation(f"{m.name} has no piece on the {side} of {L}")


def _value_at_zero(state: Form) -> Fraction:
    if isinstance(state, Constant):
        return state.c
    if state.d == 0:
        raise PieceOscillation("composite sequence diverges")
    return state.b / state.d


def _list_limit(values: Sequence[Fraction]) -> Optional[Fraction]:
    if len(values) >= 3 and values[-1] == values[-2] == values[-3]:
        return values[-1]
    if len(values) >= 4:
        d = [b - a for a, b in zip(values[-4:], values[-3:])]
        if d[0] != 0 and d[1] != 0 and d[1] / d[0] == d[2] / d[1] and abs(d[2] / d[1]) < 1:
            r = d[2] / d[1]
            return values[-2] + d[2] / (1 - r)
    return None


def sequence_limits(T: PiecewiseMap, f: PiecewiseMap, w: WitnessSequence) -> SequenceLimits:
    """(lim T x_n, lim f x_n, lim T f x_n, lim f T x_n)."""
    if isinstance(w, ExplicitList):
        xs = list(w.points)
        tx = [T(x) for x in xs]
        fx = [f(x) for x in xs]
        return SequenceLimits(_list_limit(tx), _list_limit(fx),
                              _list_limit([T(v) for v in fx]), _list_limit([f(v) for v in tx]))
    s = w.form
    sT, sf = _push(T, s), _push(f, s)
    return SequenceLimits(
        _value_at_zero(sT),
        _value_at_zero(sf),
        _value_at_zero(_push(T, sf)),
        _value_at_zero(_push(f, sT)),
    )


@dataclass
class SequenceVerdict:
    status: str
    gap: Fraction
    limits: SequenceLimits
    discrepancies: List[Tuple[str, Fraction, Fraction]] = field(default_factory=list)

    @property
    def falsified(self) -> bool:
        return self.status == FALSIFIED


def is_compatible_on(T: PiecewiseMap, f: PiecewiseMap, w: WitnessSequence) -> SequenceVerdict:
    lim = sequence_limits(T, f, w)
    if None in lim.as_tuple():
        raise InapplicableProbe("sequence limits are undetermined")
    if lim.lim_T != lim.lim_f:
        raise InapplicableProbe(f"lim T x_n = {lim.lim_T} differs from lim f x_n = {lim.lim_f}")
    gap = abs(lim.lim_Tf - lim.lim_fT)
    return SequenceVerdict(FALSIFIED if gap else NOT_FALSIFIED, gap, lim)


def is_reciprocal_continuous_on(T: PiecewiseMap, f: PiecewiseMap, w: WitnessSequence,
                                t=None) -> SequenceVerdict:
    lim = sequence_limits(T, f, w)
    if None in lim.as_tuple() or lim.lim_T != lim.lim_f:
        raise InapplicableProbe("T x_n and f x_n do not share a limit")
    t = lim.lim_T if t is None else scalar(t)
    if t != lim.lim_T:
        raise InapplicableProbe(f"common limit is {lim.lim_T}, not {t}")
    found = []
    if lim.lim_Tf != T(t):
        found.append(("Tf", lim.lim_Tf, T(t)))
    if lim.lim_fT != f(t):
        found.append(("fT", lim.lim_fT, f(t)))
    gap = max((abs(a - b) for _, a, b in found), default=Fraction(0))
    return SequenceVerdict(FALSIFIED if found else NOT_FALSIFIED, gap, lim, found)


# -------------------------------------------------------- pointwise checks

@dataclass(frozen=True)
class CommuteEvidence:
    point: object
    Tf: Optional[Fraction]
    fT: Optional[Fraction]
    continuum: bool = False

    @property
    def gap(self) -> Optional[Fraction]:
        if self.Tf is None or self.fT is None:
            return None
        return abs(self.Tf - self.fT)

    @property
    def commutes(self) -> bool:
        return self.gap == 0


@dataclass
class CommuteVerdict:
    ok: bool
    evidence: List[CommuteEvidence]
    level: str = "exact"  # "exact" or "probed"

    @property
    def witness(self) -> Optional[CommuteEvidence]:
        return next((e for e in self.evidence if not e.commutes and not _is_irrational(e.point)), None)

    def __bool__(self) -> bool:
        return self.ok


def _commutator(T: PiecewiseMap, f: PiecewiseMap, x: Fraction, continuum=False) -> CommuteEvidence:
    try:
        tf = T(f(x))
    except OutOfDomain:
        tf = None
    try:
        ft = f(T(x))
    except OutOfDomain:
        ft = None
    return CommuteEvidence(x, tf, ft, continuum)


def _probe_points(comp) -> List[Fraction]:
    """Endpoints moved inward plus the midpoint of a continuum component."""
    if isinstance(comp, Interval):
        if comp.is_point:
            return [comp.lo]
        if not comp.bounded:
            m = comp.midpoint
            return [m, m + 1, m - 1] if comp.contains(m - 1) and comp.contains(m + 1) else [m]
        off = comp.length / 1000
        lo = comp.lo if comp.lo_closed else comp.lo + off
        hi = comp.hi if comp.hi_closed else comp.hi - off
        return [lo, comp.midpoint, hi]
    if isinstance(comp, GeometricSeq):
        pts = list(comp.terms(3))
        return pts + ([comp.limit] if comp.includes_limit else [])
    return list(comp.points)


def _stable(T: PiecewiseMap, f: PiecewiseMap, pts: Sequence[Fraction]) -> bool:
    try:
        return (len({T.piece_index(x) for x in pts}) == 1 and len({f.piece_index(x) for x in pts}) == 1
                and len({T.piece_index(f(x)) for x in pts}) == 1
                and len({f.piece_index(T(x)) for x in pts}) == 1)
    except OutOfDomain:
        return False


def commutes_on_set(T: PiecewiseMap, f: PiecewiseMap, S) -> CommuteVerdict:
    """Check T(f(x)) = f(T(x)) on S (RootSet, DomainSet, or iterable of points)."""
    if isinstance(S, RootSet):
        exact, inexact = S.exact, S.inexact
    elif isinstance(S, DomainSet):
        exact, inexact = S, ()
    else:
        exact, inexact = DomainSet.points(S), ()
    evidence: List[CommuteEvidence] = []
    level = "exact"
    for comp in exact.components:
        if isinstance(comp, PointSet):
            evidence.extend(_commutator(T, f, x) for x in comp.points)
            continue
        pts = _probe_points(comp)
        evidence.extend(_commutator(T, f, x, continuum=True) for x in pts)
        if not _stable(T, f, pts):
            level = "probed"
    for r in inexact:
        # an irrational point cannot be evaluated exactly; record it unchecked
        evidence.append(CommuteEvidence(r, None, None))
        level = "probed"
    ok = all(e.commutes for e in evidence if not _is_irrational(e.point))
    return CommuteVerdict(ok, evidence, level)


def _is_irrational(p) -> bool:
    return not isinstance(p, Fraction)


def is_weakly_compatible(T: PiecewiseMap, f: PiecewiseMap) -> CommuteVerdict:
    """T and f commute at every coincidence point."""
    return commutes_on_set(T, f, coincidence_points(T, f))


def fixed_set_intersection(maps: Sequence[PiecewiseMap]) -> RootSet:
    out = fixed_points(maps[0])
    for m in maps[1:]:
        out = out.intersect(fixed_points(m))
    return out
