"""Piecewise Möbius self-maps of exact real sets.

Every piece is either a constant or ``(a x + b) / (c x + d)``. That class is
closed under composition (2x2 matrix product), and a Möbius form is monotone
on any interval that avoids its pole, so images and preimages of intervals
come out exactly.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .domain import (
    DomainSet,
    GeometricSeq,
    Interval,
    PointSet,
    SampleSet,
    _hi_key,
    _lo_key,
    sample,
    scalar,
    subset_of,
)
from .errors import (
    ImageEscapesDomain,
    NoPreimage,
    OutOfDomain,
    PoleInGuard,
    TotalityError,
    UnsupportedSetOperation,
)
from .roots import QuadraticRoot, solve_poly2


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Constant:
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", scalar(self.c))

    kind = "constant"

    def __call__(self, x: Fraction) -> Fraction:
        return self.c

    @property
    def matrix(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (Fraction(0), self.c, Fraction(0), Fraction(1))

    @property
    def pole(self) -> None:
        return None

    def __str__(self) -> str:
        return str(self.c)


@dataclass(frozen=True)
class Mobius:
    """``(a x + b) / (c x + d)`` with ad - bc != 0, scaled so c = 1 (or d = 1 when c = 0)."""

    a: Fraction
    b: Fraction
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(1)

    kind = "mobius"

    def __post_init__(self):
        a, b, c, d = (scalar(v) for v in (self.a, self.b, self.c, self.d))
        if a * d - b * c == 0:
            raise ValueError("degenerate Möbius form; use Constant")
        k = c if c != 0 else d
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v / k)

    @property
    def matrix(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def pole(self) -> Optional[Fraction]:
        return -self.d / self.c if self.c != 0 else None

    @property
    def increasing(self) -> bool:
        return self.det > 0

    @property
    def is_identity(self) -> bool:
        return self.matrix == (1, 0, 0, 1)

    def __call__(self, x: Fraction) -> Fraction:
        den = self.c * x + self.d
        if den == 0:
            raise PoleInGuard(f"{self} evaluated at its pole {x}")
        return (self.a * x + self.b) / den

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __str__(self) -> str:
        num = _linear_str(self.a, self.b)
        if self.c == 0:
            return num
        return f"({num})/({_linear_str(self.c, self.d)})"


def _linear_str(p: Fraction, q: Fraction) -> str:
    terms = []
    if p != 0:
        terms.append("x" if p == 1 else "-x" if p == -1 else f"{p}*x")
    if q != 0 or not terms:
        terms.append(str(q) if not terms else (f"+ {q}" if q > 0 else f"- {-q}"))
    return " ".join(terms)


Form = Union[Constant, Mobius]


def make_form(a, b, c=0, d=1) -> Form:
    """Build a form from matrix entries, collapsing degenerate ones to constants."""
    a, b, c, d = (scalar(v) for v in (a, b, c, d))
    if c == 0 and d == 0:
        raise ValueError("form with zero denominator")
    if a * d - b * c == 0:
        return Constant(a / c if c != 0 else b / d)
    return Mobius(a, b, c, d)


def compose_forms(outer: Form, inner: Form) -> Form:
    """The form of ``outer(inner(x))``."""
    if isinstance(inner, Constant):
        return Constant(outer(inner.c))
    if isinstance(outer, Constant):
        return outer
    a1, b1, c1, d1 = outer.matrix
    a2, b2, c2, d2 = inner.matrix
    return make_form(a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)


# ---------------------------------------------------------------- intervals

def _end_image(form: Mobius, x: Optional[Fraction], closed: bool, is_lo: bool):
    """Image of one interval end: (value or None for infinity, closed, infinity sign)."""
    if x is None:
        direction = -1 if is_lo else 1
        if form.c != 0:
            return form.a / form.c, False, 0
        return None, False, direction * _sign(form.a)
    if form.c * x + form.d == 0:
        # Pole at an open endpoint: the image runs off to infinity.
        n = form.a * x + form.b
        side = 1 if is_lo else -1
        return None, False, _sign(n) * _sign(form.c) * side
    return form(x), closed, 0


def mobius_image(form: Form, iv: Interval) -> Interval:
    """Exact image of a pole-free interval."""
    if isinstance(form, Constant):
        return Interval.point(form.c)
    if iv.is_point:
        return Interval.point(form(iv.lo))
    lo = _end_image(form, iv.lo, iv.lo_closed, True)
    hi = _end_image(form, iv.hi, iv.hi_closed, False)
    if not form.increasing:
        lo, hi = hi, lo
    return Interval(lo[0], hi[0], lo[1], hi[1])


def mobius_preimage(form: Mobius, target: Interval, guard: Interval) -> Optional[Interval]:
    """Points of `guard` that `form` maps into `target`."""
    hull = mobius_image(form, guard)
    j = hull.intersect(target)
    if j is None:
        return None
    back = mobius_image(form.inverse(), j)
    return back.intersect(guard)


# --------------------------------------------------------------------- maps

@dataclass(frozen=True)
class MapPiece:
    guard: Interval
    form: Form

    def __str__(self) -> str:
        return f"{self.form} on {self.guard}"


@dataclass(frozen=True)
class Preimage:
    """One solution of m(x) = target; `continuum` is set when a whole region maps there."""

    point: Fraction
    continuum: Optional[DomainSet] = None


class RootSet:
    """Exact rational part plus symbolic irrational roots."""

    def __init__(self, exact: DomainSet = None, inexact: Iterable[QuadraticRoot] = ()):
        self.exact = exact if exact is not None else DomainSet()
        self.inexact = tuple(sorted(set(inexact), key=lambda r: r.isolate()[0]))

    def __eq__(self, other) -> bool:
        if isinstance(other, DomainSet):
            return not self.inexact and self.exact == other
        return isinstance(other, RootSet) and self.exact == other.exact and self.inexact == other.inexact

    def __repr__(self) -> str:
        return f"RootSet({self})"

    def __str__(self) -> str:
        parts = [] if self.exact.is_empty() else [str(self.exact)]
        parts += [f"~{r.approx():.12g} [{r}]" for r in self.inexact]
        return " U ".join(parts) if parts else "{}"

    def is_empty(self) -> bool:
        return self.exact.is_empty() and not self.inexact

    def contains(self, x) -> bool:
        if isinstance(x, QuadraticRoot):
            return x in self.inexact or _irrational_in(x, self.exact)
        return self.exact.contains(x)

    def union(self, other: "RootSet") -> "RootSet":
        return RootSet(self.exact.union(other.exact), self.inexact + other.inexact)

    def intersect(self, other: "RootSet") -> "RootSet":
        inexact = [r for r in self.inexact if other.contains(r)]
        inexact += [r for r in other.inexact if _irrational_in(r, self.exact)]
        return RootSet(self.exact.intersect(other.exact), inexact)

    def isolated_points(self) -> List[Fraction]:
        return [p for c in self.exact.components if isinstance(c, PointSet) for p in c.points]

    def continua(self) -> list:
        return [c for c in self.exact.components if not isinstance(c, PointSet)]

    def subset_of(self, other: "RootSet") -> bool:
        ok, _ = subset_of(self.exact, other.exact)
        return ok and all(other.contains(r) for r in self.inexact)


def _irrational_in(r: QuadraticRoot, S: DomainSet) -> bool:
    return any(r.within(iv.lo, iv.hi) for iv in S.intervals)


def _representative(R: DomainSet) -> Fraction:
    c = R.components[0]
    if isinstance(c, Interval):
        return c.midpoint
    if isinstance(c, PointSet):
        return c.points[0]
    return c.term(0)


class PiecewiseMap:
    """A total map on `domain` given by guarded pieces.

    Guards must be pairwise disjoint and cover the domain; the image must lie
    in `codomain` (the domain itself unless stated otherwise).
    """

    def __init__(self, domain: DomainSet, pieces: Sequence[MapPiece],
                 codomain: Optional[DomainSet] = None, name: str = "m"):
        self.domain = domain
        self.codomain = codomain if codomain is not None else domain
        self.name = name
        kept = []
        for p in pieces:
            pole = p.form.pole
            if pole is not None and p.guard.contains(pole):
                raise PoleInGuard(f"piece {p} of {name} contains its pole {pole}")
            region = domain.intersect_interval(p.guard)
            if not region.is_empty():
                kept.append((p, region))
        kept.sort(key=lambda pr: _lo_key(pr[0].guard))
        for (p, _), (q, _) in zip(kept, kept[1:]):
            overlap = p.guard.intersect(q.guard)
            if overlap is not None:
                raise TotalityError(f"guards of {name} overlap", overlap.lo if overlap.lo is not None else overlap.hi)
        self.pieces: Tuple[MapPiece, ...] = tuple(p for p, _ in kept)
        self.regions: Tuple[DomainSet, ...] = tuple(r for _, r in kept)
        self._keys = [_lo_key(p.guard) for p in self.pieces]
        covered, gap = subset_of(domain, DomainSet([p.guard for p in self.pieces]))
        if not covered:
            raise TotalityError(f"guards of {name} leave a gap", gap)
        ok, w = subset_of(self.image(), self.codomain)
        if not ok:
            raise ImageEscapesDomain(self._some_preimage(w), w)

    def __repr__(self) -> str:
        return f"PiecewiseMap({self.name}: " + "; ".join(str(p) for p in self.pieces) + ")"

    def piece_index(self, x: Fraction) -> int:
        i = bisect_right(self._keys, (1, x, 0)) - 1
        if i < 0 or not self.pieces[i].guard.contains(x):
            raise OutOfDomain(x, self.name)
        return i

    def piece_at(self, x: Fraction) -> MapPiece:
        return self.pieces[self.piece_index(x)]

    def __call__(self, x) -> Fraction:
        x = scalar(x)
        if not self.domain.contains(x):
            raise OutOfDomain(x, self.name)
        return self.piece_at(x).form(x)

    evaluate = __call__

    def image(self, S: Optional[DomainSet] = None) -> DomainSet:
        S = self.domain if S is None else S
        out: list = []
        for p in self.pieces:
            for comp in S.intersect_interval(p.guard).components:
                out.append(_component_image(p.form, comp))
        return DomainSet(out)

    def breakpoints(self) -> Tuple[Fraction, ...]:
        pts = set()
        for p in self.pieces:
            if p.guard.lo is not None:
                pts.add(p.guard.lo)
            if p.guard.hi is not None:
                pts.add(p.guard.hi)
        return tuple(sorted(pts))

    def simplified(self) -> "PiecewiseMap":
        """Merge neighbouring pieces that share a form and touch."""
        merged: List[MapPiece] = []
        for p in self.pieces:
            if merged:
                q = merged[-1]
                g, h = q.guard, p.guard
                if q.form == p.form and g.hi is not None and g.hi == h.lo and (g.hi_closed or h.lo_closed):
                    merged[-1] = MapPiece(Interval(g.lo, h.hi, g.lo_closed, h.hi_closed), q.form)
                    continue
            merged.append(p)
        return PiecewiseMap(self.domain, merged, self.codomain, self.name)

    def preimages(self, target) -> List[Preimage]:
        target = scalar(target)
        out = []
        for p, R in zip(self.pieces, self.regions):
            if isinstance(p.form, Constant):
                if p.form.c == target:
                    out.append(Preimage(_representative(R), R))
                continue
            inv = p.form.inverse()
            if inv.c * target + inv.d == 0:
                continue
            x = inv(target)
            if R.contains(x):
                out.append(Preimage(x))
        if not out:
            raise NoPreimage(target, self.name)
        return out

    def preimage_set(self, target) -> DomainSet:
        try:
            pre = self.preimages(target)
        except NoPreimage:
            return DomainSet()
        comps: list = []
        for p in pre:
            comps.extend(p.continuum.components if p.continuum is not None else [PointSet((p.point,))])
        return DomainSet(comps)

    def _some_preimage(self, value: Fraction) -> Optional[Fraction]:
        for p, R in zip(self.pieces, self.regions):
            if isinstance(p.form, Constant):
                if p.form.c == value:
                    return _representative(R)
            else:
                inv = p.form.inverse()
                if inv.c * value + inv.d != 0 and R.contains(inv(value)):
                    return inv(value)
        return None


def _component_image(form: Form, comp) -> DomainSet:
    if isinstance(form, Constant):
        return PointSet((form.c,))
    if isinstance(comp, Interval):
        return mobius_image(form, comp)
    if isinstance(comp, PointSet):
        return PointSet(tuple(form(p) for p in comp.points))
    if form.c == 0:
        a, b = form.a / form.d, form.b / form.d
        return GeometricSeq(a * comp.base, comp.ratio, comp.includes_limit, a * comp.limit + b)
    raise UnsupportedSetOperation(f"image of {comp} under non-affine {form}")


def evaluate(m: PiecewiseMap, x) -> Fraction:
    return m(x)


def image(m: PiecewiseMap, S: Optional[DomainSet] = None) -> DomainSet:
    return m.image(S)


def compose(outer: PiecewiseMap, inner: PiecewiseMap, name: Optional[str] = None) -> PiecewiseMap:
    """The map ``x -> outer(inner(x))`` on inner's domain."""
    ok, w = subset_of(inner.image(), outer.domain)
    if not ok:
        raise ImageEscapesDomain(inner._some_preimage(w), w)
    pieces: List[MapPiece] = []
    for p in inner.pieces:
        if isinstance(p.form, Constant):
            q = outer.piece_at(p.form.c)
            pieces.append(MapPiece(p.guard, Constant(q.form(p.form.c))))
            continue
        for q in outer.pieces:
            guard = mobius_preimage(p.form, q.guard, p.guard)
            if guard is not None:
                pieces.append(MapPiece(guard, compose_forms(q.form, p.form)))
    label = name or f"{outer.name}∘{inner.name}"
    return PiecewiseMap(inner.domain, pieces, outer.codomain, label).simplified()


def iterate_map(m: PiecewiseMap, power: int) -> PiecewiseMap:
    if power < 1:
        raise ValueError("power must be a positive integer")
    result = m
    for k in range(2, power + 1):
        result = compose(m, result, name=f"{m.name}^{k}")
    return result


def _solve_on(region: DomainSet, a2, a1, a0) -> RootSet:
    sol = solve_poly2(a2, a1, a0)
    if sol.identically_zero:
        return RootSet(region)
    exact = DomainSet.points(r for r in sol.rational if region.contains(r))
    return RootSet(exact, [r for r in sol.irrational if _irrational_in(r, region)])


def fixed_points(m: PiecewiseMap) -> RootSet:
    """F(m) = {x : m(x) = x}, exactly."""
    parts = []
    for p, R in zip(m.pieces, m.regions):
        a, b, c, d = p.form.matrix
        # x (c x + d) = a x + b
        parts.append(_solve_on(R, c, d - a, -b))
    return RootSet(DomainSet([c for r in parts for c in r.exact.components]), [x for r in parts for x in r.inexact])


def coincidence_points(m1: PiecewiseMap, m2: PiecewiseMap, within: Optional[DomainSet] = None) -> RootSet:
    """C(m1, m2) = {x : m1(x) = m2(x)}, exactly."""
    parts: List[RootSet] = []
    # both guard lists are sorted and disjoint, so one sweep visits every overlap
    i = j = 0
    while i < len(m1.pieces) and j < len(m2.pieces):
        p, q = m1.pieces[i], m2.pieces[j]
        g = p.guard.intersect(q.guard)
        if g is not None:
            R = m1.regions[i].intersect(m2.regions[j]).intersect_interval(g)
            if within is not None:
                R = R.intersect(within)
            if not R.is_empty():
                a1, b1, c1, d1 = p.form.matrix
                a2, b2, c2, d2 = q.form.matrix
                parts.append(_solve_on(
                    R,
                    a1 * c2 - a2 * c1,
                    a1 * d2 + b1 * c2 - a2 * d1 - b2 * c1,
                    b1 * d2 - b2 * d1,
                ))
        hp, hq = _hi_key(p.guard), _hi_key(q.guard)
        if hp <= hq:
            i += 1
        if hq <= hp:
            j += 1
    exact = DomainSet([c for r in parts for c in r.exact.components])
    return RootSet(exact, [x for r in parts for x in r.inexact])


def preimages(m: PiecewiseMap, target) -> List[Preimage]:
    return m.preimages(target)


@dataclass
class MapFamily:
    """Indexed maps T_1, T_2, ... built on demand."""

    generator: Callable[[int], PiecewiseMap]
    name: str = "T"
    materialized: Dict[int, PiecewiseMap] = field(default_factory=dict)

    def __call__(self, n: int) -> PiecewiseMap:
        if n < 1:
            raise ValueError("family index starts at 1")
        if n not in self.materialized:
            self.materialized[n] = self.generator(n)
        return self.materialized[n]

    member = __call__


def sample_for_maps(domain: DomainSet, maps: Sequence[PiecewiseMap], resolution: int = 64,
                    edge_offset=None, extra: Iterable = ()) -> SampleSet:
    """Map-aware sample: every breakpoint (and rational fixed/coincidence point) +- offset."""
    special = set(scalar(x) for x in extra)
    for m in maps:
        special.update(m.breakpoints())
        special.update(fixed_points(m).isolated_points())
    for i, m in enumerate(maps):
        for n in maps[i + 1:]:
            special.update(coincidence_points(m, n).isolated_points())
    return sample(domain, resolution, edge_offset, sorted(special))
