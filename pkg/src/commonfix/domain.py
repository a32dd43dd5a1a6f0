"""Exact subsets of the real line.

A `DomainSet` is a normalized union of three component kinds:

* `Interval` -- possibly open, half-open or unbounded;
* `PointSet` -- a finite sorted set of points;
* `GeometricSeq` -- the countable set ``limit + base * ratio**k`` (k >= 0),
  optionally together with its limit.

All values are `fractions.Fraction`; no floating point is involved anywhere.
"""
from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

from .errors import EdgeOffsetTooLarge, UnsupportedSetOperation

Scalar = Fraction

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def scalar(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact Fraction.

    Floats and decimal strings are rejected so precision is never lost
    silently.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.replace(" ", "")
        if not _RATIONAL.match(text):
            raise ValueError(f"not a rational string: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot build an exact scalar from {type(value).__name__}")


def fmt(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else str(x)


def metric_distance(x: Fraction, y: Fraction) -> Fraction:
    """Usual metric on the real line."""
    return abs(x - y)


# Bound keys order lower/upper endpoints with openness; None means infinite.
def _lo_key(iv: "Interval"):
    if iv.lo is None:
        return (0, 0, 0)
    return (1, iv.lo, 0 if iv.lo_closed else 1)


def _hi_key(iv: "Interval"):
    if iv.hi is None:
        return (2, 0, 0)
    return (1, iv.hi, 0 if iv.hi_closed else -1)


@dataclass(frozen=True)
class Interval:
    lo: Optional[Fraction]
    hi: Optional[Fraction]
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", scalar(self.lo))
        elif self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if self.hi is not None:
            object.__setattr__(self, "hi", scalar(self.hi))
        elif self.hi_closed:
            object.__setattr__(self, "hi_closed", False)
        if self.lo is not None and self.hi is not None:
            if self.lo > self.hi:
                raise ValueError(f"empty interval: lo {self.lo} > hi {self.hi}")
            if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
                raise ValueError(f"degenerate interval at {self.lo} must be closed")

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x, True, True)

    @property
    def is_point(self) -> bool:
        return self.lo is not None and self.lo == self.hi

    @property
    def bounded(self) -> bool:
        return self.lo is not None and self.hi is not None

    @property
    def length(self) -> Optional[Fraction]:
        return self.hi - self.lo if self.bounded else None

    @property
    def midpoint(self) -> Fraction:
        if self.bounded:
            return (self.lo + self.hi) / 2
        if self.lo is not None:
            return self.lo + 1
        if self.hi is not None:
            return self.hi - 1
        return Fraction(0)

    def contains(self, x: Fraction) -> bool:
        if self.lo is not None and (x < self.lo or (x == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (x > self.hi or (x == self.hi and not self.hi_closed)):
            return False
        return True

    __contains__ = contains

    def has_right_nbhd(self, x: Fraction) -> bool:
        """True when (x, x + eps) lies in the interval for some eps > 0."""
        return (self.lo is None or self.lo <= x) and (self.hi is None or x < self.hi)

    def has_left_nbhd(self, x: Fraction) -> bool:
        return (self.lo is None or self.lo < x) and (self.hi is None or x <= self.hi)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo = max(_lo_key(self), _lo_key(other))
        hi = min(_hi_key(self), _hi_key(other))
        lo_v = None if lo[0] == 0 else lo[1]
        hi_v = None if hi[0] == 2 else hi[1]
        lo_c = lo[0] == 1 and lo[2] == 0
        hi_c = hi[0] == 1 and hi[2] == 0
        if lo_v is not None and hi_v is not None:
            if lo_v > hi_v or (lo_v == hi_v and not (lo_c and hi_c)):
                return None
        return Interval(lo_v, hi_v, lo_c, hi_c)

    def closure(self) -> "Interval":
        return Interval(self.lo, self.hi, self.lo is not None, self.hi is not None)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"{left}{lo}, {hi}{right}"


@dataclass(frozen=True)
class PointSet:
    points: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(sorted({scalar(p) for p in self.points})))

    def contains(self, x: Fraction) -> bool:
        i = bisect_left(self.points, x)
        return i < len(self.points) and self.points[i] == x

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.points) + "}"


@dataclass(frozen=True)
class GeometricSeq:
    """The points ``limit + base * ratio**k`` for k = 0, 1, 2, ..."""

    base: Fraction
    ratio: Fraction
    includes_limit: bool = False
    limit: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("base", "ratio", "limit"):
            object.__setattr__(self, name, scalar(getattr(self, name)))
        if self.base == 0:
            raise ValueError("geometric sequence needs a nonzero base")
        if not 0 < self.ratio < 1:
            raise ValueError(f"ratio {self.ratio} not in (0, 1)")

    def term(self, k: int) -> Fraction:
        return self.limit + self.base * self.ratio ** k

    def terms(self, n: int) -> Iterator[Fraction]:
        offset = self.base
        for _ in range(n):
            yield self.limit + offset
            offset *= self.ratio

    def index_of(self, x: Fraction) -> Optional[int]:
        q = (x - self.limit) / self.base
        if q <= 0 or q > 1:
            return None
        p, k = Fraction(1), 0
        while p > q:
            p *= self.ratio
            k += 1
        return k if p == q else None

    def contains(self, x: Fraction) -> bool:
        if x == self.limit:
            return self.includes_limit
        return self.index_of(x) is not None

    @property
    def hull(self) -> Interval:
        first = self.limit + self.base
        if self.base > 0:
            return Interval(self.limit, first, self.includes_limit, True)
        return Interval(first, self.limit, True, self.includes_limit)

    def tail_start(self, iv: Interval) -> Optional[int]:
        """First index from which every term lies in `iv`, or None."""
        near = iv.has_right_nbhd(self.limit) if self.base > 0 else iv.has_left_nbhd(self.limit)
        if not near:
            return None
        k, t = 0, self.limit + self.base
        while not iv.contains(t):
            k += 1
            t = self.limit + self.base * self.ratio ** k
        return k

    def shifted(self, k: int) -> "GeometricSeq":
        return GeometricSeq(self.base * self.ratio ** k, self.ratio, self.includes_limit, self.limit)

    def restrict(self, iv: Interval) -> list:
        """Components of (this set) intersected with `iv`."""
        out = []
        k0 = self.tail_start(iv)
        if k0 is None:
            # iv stays away from the limit side, so only finitely many terms
            # can land in it; walk until the terms have moved past iv.
            pts = []
            if self.base > 0 and (iv.hi is None or iv.hi > self.limit):
                for t in self._walk():
                    if t < iv.lo:
                        break
                    if iv.contains(t):
                        pts.append(t)
            elif self.base < 0 and (iv.lo is None or iv.lo < self.limit):
                for t in self._walk():
                    if t > iv.hi:
                        break
                    if iv.contains(t):
                        pts.append(t)
            if self.includes_limit and iv.contains(self.limit):
                pts.append(self.limit)
            return [PointSet(tuple(pts))] if pts else []
        prefix = [t for t in self.terms(k0) if iv.contains(t)]
        if prefix:
            out.append(PointSet(tuple(prefix)))
        out.append(GeometricSeq(self.base * self.ratio ** k0, self.ratio,
                                self.includes_limit and iv.contains(self.limit), self.limit))
        return out

    def _walk(self) -> Iterator[Fraction]:
        offset = self.base
        while True:
            yield self.limit + offset
            offset *= self.ratio

    def __str__(self) -> str:
        lim = f"{self.limit} + " if self.limit else ""
        tail = f" U {{{self.limit}}}" if self.includes_limit else ""
        return f"{{{lim}{self.base}*({self.ratio})^k}}{tail}"


Component = Union[Interval, PointSet, GeometricSeq]


def _merge_intervals(ivs: Sequence[Interval]) -> list:
    ivs = sorted(ivs, key=_lo_key)
    merged: list = []
    for iv in ivs:
        if merged:
            cur = merged[-1]
            touches = (
                cur.hi is None
                or iv.lo is None
                or iv.lo < cur.hi
                or (iv.lo == cur.hi and (iv.lo_closed or cur.hi_closed))
            )
            if touches:
                hi = max(_hi_key(cur), _hi_key(iv))
                hi_v = None if hi[0] == 2 else hi[1]
                merged[-1] = Interval(cur.lo, hi_v, cur.lo_closed, hi[0] == 1 and hi[2] == 0)
                continue
        merged.append(iv)
    return merged


def _component_key(c: Component):
    if isinstance(c, Interval):
        return _lo_key(c)
    if isinstance(c, PointSet):
        return (1, c.points[0], 0)
    return _lo_key(c.hull)


def _normalize(components: Iterable[Component]) -> Tuple[Component, ...]:
    ivs, pts, geos = [], set(), []
    for c in components:
        if isinstance(c, Interval):
            if c.is_point:
                pts.add(c.lo)
            else:
                ivs.append(c)
        elif isinstance(c, PointSet):
            pts.update(c.points)
        elif isinstance(c, GeometricSeq):
            geos.append(c)
        else:
            raise TypeError(f"not a set component: {c!r}")

    ivs = _merge_intervals(ivs)
    # Points (and included geometric limits) sitting on open endpoints close
    # them; repeat until stable since closing can glue two intervals.
    closers = pts | {g.limit for g in geos if g.includes_limit}
    changed = True
    while changed:
        changed = False
        new = []
        for iv in ivs:
            lo_c, hi_c = iv.lo_closed, iv.hi_closed
            if iv.lo is not None and not lo_c and iv.lo in closers:
                lo_c, changed = True, True
            if iv.hi is not None and not hi_c and iv.hi in closers:
                hi_c, changed = True, True
            new.append(Interval(iv.lo, iv.hi, lo_c, hi_c))
        ivs = _merge_intervals(new)
    pts = {p for p in pts if not any(iv.contains(p) for iv in ivs)}

    kept_geos = []
    for g in geos:
        if not g.includes_limit and g.limit in pts:
            g = GeometricSeq(g.base, g.ratio, True, g.limit)
        pts = {p for p in pts if not g.contains(p)}
        limit_covered = not g.includes_limit or any(iv.contains(g.limit) for iv in ivs)
        if limit_covered and any(g.tail_start(iv) == 0 for iv in ivs):
            continue
        if g not in kept_geos:
            kept_geos.append(g)

    comps: list = list(ivs)
    if pts:
        comps.append(PointSet(tuple(pts)))
    comps.extend(kept_geos)
    comps.sort(key=_component_key)
    return tuple(comps)


class DomainSet:
    """Normalized union of intervals, finite point sets and geometric sequences."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Component] = ()):
        self.components = _normalize(components)

    @classmethod
    def interval(cls, lo, hi, lo_closed=True, hi_closed=True) -> "DomainSet":
        return cls([Interval(lo, hi, lo_closed, hi_closed)])

    @classmethod
    def points(cls, pts: Iterable) -> "DomainSet":
        pts = [scalar(p) for p in pts]
        return cls([PointSet(tuple(pts))] if pts else [])

    def __eq__(self, other) -> bool:
        return isinstance(other, DomainSet) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return f"DomainSet({self})"

    def __str__(self) -> str:
        if not self.components:
            return "{}"
        return " U ".join(str(c) for c in self.components)

    def __iter__(self):
        return iter(self.components)

    def is_empty(self) -> bool:
        return not self.components

    def contains(self, x) -> bool:
        x = scalar(x)
        return any(c.contains(x) for c in self.components)

    __contains__ = contains

    @property
    def intervals(self) -> list:
        return [c for c in self.components if isinstance(c, Interval)]

    def is_finite(self) -> bool:
        return all(isinstance(c, PointSet) for c in self.components)

    def finite_points(self) -> Tuple[Fraction, ...]:
        if not self.is_finite():
            raise UnsupportedSetOperation(f"{self} is not a finite set")
        return tuple(p for c in self.components for p in c.points)

    def union(self, other: "DomainSet") -> "DomainSet":
        return DomainSet(self.components + other.components)

    def intersect_interval(self, iv: Interval) -> "DomainSet":
        out: list = []
        for c in self.components:
            out.extend(_intersect_components(c, iv))
        return DomainSet(out)

    def intersect(self, other: "DomainSet") -> "DomainSet":
        out: list = []
        for a in self.components:
            for b in other.components:
                out.extend(_intersect_components(a, b))
        return DomainSet(out)

    def breakpoints(self) -> Tuple[Fraction, ...]:
        bps = set()
        for iv in self.intervals:
            if iv.lo is not None:
                bps.add(iv.lo)
            if iv.hi is not None:
                bps.add(iv.hi)
        return tuple(sorted(bps))


def _intersect_components(a: Component, b: Component) -> list:
    if isinstance(a, PointSet):
        return [PointSet(tuple(p for p in a.points if b.contains(p)))] if any(
            b.contains(p) for p in a.points) else []
    if isinstance(b, PointSet):
        return _intersect_components(b, a)
    if isinstance(a, Interval) and isinstance(b, Interval):
        iv = a.intersect(b)
        return [iv] if iv is not None else []
    if isinstance(a, GeometricSeq) and isinstance(b, Interval):
        return a.restrict(b)
    if isinstance(a, Interval) and isinstance(b, GeometricSeq):
        return b.restrict(a)
    return _intersect_geometric(a, b)


def _ratio_power(r: Fraction, q: Fraction) -> Optional[int]:
    """j with r**j == q, if any."""
    p, j = r, 1
    while p > q:
        p *= r
        j += 1
    return j if p == q else None


def _intersect_geometric(a: GeometricSeq, b: GeometricSeq) -> list:
    if a.limit == b.limit:
        inc = a.includes_limit and b.includes_limit
        # a's terms are all terms of b when a.base is a term of b and a's
        # ratio is an integer power of b's ratio.
        if b.contains(a.base + a.limit) and _ratio_power(b.ratio, a.ratio) is not None:
            return [GeometricSeq(a.base, a.ratio, inc, a.limit)]
        if a.contains(b.base + b.limit) and _ratio_power(a.ratio, b.ratio) is not None:
            return [GeometricSeq(b.base, b.ratio, inc, b.limit)]
    raise UnsupportedSetOperation(f"cannot intersect {a} and {b} exactly")


def _safe_interval(lo, hi, lo_c, hi_c) -> Optional[Interval]:
    try:
        return Interval(lo, hi, lo_c, hi_c)
    except ValueError:
        return None


def _interval_minus(iv: Interval, holes: Sequence[Interval]) -> list:
    pieces = [iv]
    for h in holes:
        nxt = []
        for p in pieces:
            if p.intersect(h) is None:
                nxt.append(p)
                continue
            if _lo_key(p) < _lo_key(h):
                left = _safe_interval(p.lo, h.lo, p.lo_closed, not h.lo_closed)
                if left is not None:
                    nxt.append(left)
            if _hi_key(h) < _hi_key(p):
                right = _safe_interval(h.hi, p.hi, not h.hi_closed, p.hi_closed)
                if right is not None:
                    nxt.append(right)
        pieces = nxt
    return pieces


def _point_outside(iv: Interval, B: DomainSet) -> Optional[Fraction]:
    if iv.is_point:
        return None if B.contains(iv.lo) else iv.lo
    if iv.bounded:
        lo, width = iv.lo, iv.hi - iv.lo
        candidates = [lo + width * Fraction(k, k + 1) for k in range(1, 64)]
        candidates.insert(0, iv.midpoint)
    else:
        m = iv.midpoint
        candidates = [m + k for k in range(64)] if iv.hi is None else [m - k for k in range(64)]
    for c in candidates:
        if iv.contains(c) and not B.contains(c):
            return c
    raise UnsupportedSetOperation(f"no point of {iv} found outside {B}")


def subset_of(A: DomainSet, B: DomainSet) -> Tuple[bool, Optional[Fraction]]:
    """Exact inclusion test; on failure returns a point of A that is not in B."""
    b_ivs = B.intervals
    for c in A.components:
        if isinstance(c, PointSet):
            for p in c.points:
                if not B.contains(p):
                    return False, p
        elif isinstance(c, Interval):
            for rest in _interval_minus(c, b_ivs):
                w = _point_outside(rest, B)
                if w is not None:
                    return False, w
        else:
            w = _geometric_outside(c, B)
            if w is not None:
                return False, w
    return True, None


def _geometric_outside(g: GeometricSeq, B: DomainSet) -> Optional[Fraction]:
    if g.includes_limit and not B.contains(g.limit):
        return g.limit
    for iv in B.intervals:
        k0 = g.tail_start(iv)
        if k0 is not None:
            for t in g.terms(k0):
                if not B.contains(t):
                    return t
            return None
    for h in B.components:
        if isinstance(h, GeometricSeq) and h.limit == g.limit:
            if h.contains(g.limit + g.base) and _ratio_power(h.ratio, g.ratio) is not None:
                return None
    n_pts = sum(len(c.points) for c in B.components if isinstance(c, PointSet))
    for t in g.terms(n_pts + 256):
        if not B.contains(t):
            return t
    raise UnsupportedSetOperation(f"cannot decide whether {g} lies in {B}")


def closure(S: DomainSet) -> DomainSet:
    out = []
    for c in S.components:
        if isinstance(c, Interval):
            out.append(c.closure())
        elif isinstance(c, GeometricSeq):
            out.append(GeometricSeq(c.base, c.ratio, True, c.limit))
        else:
            out.append(c)
    return DomainSet(out)


def is_complete(S: DomainSet) -> Tuple[bool, Optional[Fraction]]:
    """A subset of the real line is complete iff closed; witness is a missing limit point."""
    for c in S.components:
        if isinstance(c, Interval):
            if c.lo is not None and not c.lo_closed and not S.contains(c.lo):
                return False, c.lo
            if c.hi is not None and not c.hi_closed and not S.contains(c.hi):
                return False, c.hi
        elif isinstance(c, GeometricSeq):
            if not c.includes_limit and not S.contains(c.limit):
                return False, c.limit
    return True, None


def contains(S: DomainSet, x) -> bool:
    return S.contains(x)


@dataclass(frozen=True)
class SampleSet:
    points: Tuple[Fraction, ...]
    grid_resolution: int
    edge_offset: Optional[Fraction]
    breakpoints_included: bool

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)


def sample(
    S: DomainSet,
    resolution: int = 64,
    edge_offset=None,
    breakpoints: Iterable = (),
) -> SampleSet:
    """Deterministic finite sample of `S`.

    Each bounded interval contributes `resolution` interior grid points, its
    closed endpoints, and its open endpoints moved inward by the edge offset
    (default: length / 1000). Every breakpoint ``b`` contributes ``b`` and
    ``b +- offset`` when they belong to `S`. Point sets contribute all their
    points; geometric sequences their first `resolution` terms and limit.
    """
    if resolution < 1:
        raise ValueError("resolution must be positive")
    ivs = [iv for iv in S.intervals if not iv.is_point]
    if edge_offset is not None:
        edge_offset = scalar(edge_offset)
        if edge_offset <= 0:
            raise EdgeOffsetTooLarge("edge offset must be positive")
        lengths = [iv.length for iv in ivs if iv.bounded]
        if lengths and edge_offset >= min(lengths) / 2:
            raise EdgeOffsetTooLarge(
                f"edge offset {edge_offset} is not below half the shortest interval ({min(lengths) / 2})")

    pts = set()

    def offset_for(iv: Interval) -> Fraction:
        return edge_offset if edge_offset is not None else iv.length / 1000

    for c in S.components:
        if isinstance(c, Interval):
            if not c.bounded:
                raise UnsupportedSetOperation(f"cannot sample unbounded interval {c}")
            off = offset_for(c)
            for i in range(resolution):
                pts.add(c.lo + c.length * Fraction(i + 1, resolution + 1))
            pts.add(c.lo if c.lo_closed else c.lo + off)
            pts.add(c.hi if c.hi_closed else c.hi - off)
        elif isinstance(c, PointSet):
            pts.update(c.points)
        else:
            pts.update(c.terms(resolution))
            if c.includes_limit:
                pts.add(c.limit)

    bps = [scalar(b) for b in breakpoints]
    for b in bps:
        owner = next((iv for iv in ivs if iv.closure().contains(b)), None)
        if owner is None:
            if S.contains(b):
                pts.add(b)
            continue
        off = offset_for(owner)
        for p in (b - off, b, b + off):
            if S.contains(p):
                pts.add(p)

    out = tuple(sorted(pts))
    assert all(S.contains(p) for p in out)
    return SampleSet(out, resolution, edge_offset, bool(bps))
