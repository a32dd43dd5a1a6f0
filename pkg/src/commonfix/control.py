"""Control functions on the nonnegative ray.

A control function is piecewise: constant, Möbius, or a piecewise-linear
table of knots. Regularity (monotone, continuous, usc, below the identity)
is checked exactly and reported with concrete witnesses. The synthesis
pipeline upgrades an upper semicontinuous phi with phi(t) < t to a monotone
continuous psi that dominates it, certified on a finite grid.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .domain import DomainSet, Interval, SampleSet, _lo_key, scalar, subset_of
from .errors import EnvelopeImpossible, NegativeArgument, PoleInGuard, RatioReachesOne, TotalityError
from .maps import Constant, Mobius

ZERO = Fraction(0)
HALF_LINE = Interval(0, None, True, False)


@dataclass(frozen=True)
class LinearTable:
    """Piecewise-linear interpolation through sorted (t, v) knots."""

    knots: Tuple[Tuple[Fraction, Fraction], ...]

    kind = "linear_table"

    def __post_init__(self):
        knots = tuple((scalar(t), scalar(v)) for t, v in self.knots)
        if not knots:
            raise ValueError("linear table needs at least one knot")
        if any(a[0] >= b[0] for a, b in zip(knots, knots[1:])):
            raise ValueError("knots must have strictly increasing t")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "_ts", [t for t, _ in knots])
        object.__setattr__(self, "_at", dict(knots))

    def __call__(self, t: Fraction) -> Fraction:
        hit = self._at.get(t)
        if hit is not None:
            return hit
        ts = self._ts
        if t <= ts[0]:
            return self.knots[0][1]
        if t >= ts[-1]:
            return self.knots[-1][1]
        i = bisect_right(ts, t) - 1
        (t0, v0), (t1, v1) = self.knots[i], self.knots[i + 1]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    @property
    def pole(self) -> None:
        return None

    def slopes(self) -> List[Fraction]:
        return [(v1 - v0) / (t1 - t0) for (t0, v0), (t1, v1) in zip(self.knots, self.knots[1:])]

    def __str__(self) -> str:
        return f"table[{len(self.knots)} knots]"


CFForm = Union[Constant, Mobius, LinearTable]


@dataclass(frozen=True)
class CFPiece:
    guard: Interval
    form: CFForm


@dataclass
class ControlFunction:
    """Total function on [0, inf) with value 0 at 0."""

    pieces: Tuple[CFPiece, ...]
    monotone_increasing: bool = False
    continuous: bool = False
    upper_semicontinuous: bool = False
    name: str = "phi"

    def __post_init__(self):
        self.pieces = tuple(sorted(self.pieces, key=lambda p: _lo_key(p.guard)))
        self._keys = [_lo_key(p.guard) for p in self.pieces]
        validate_control(self)

    @property
    def declared_flags(self) -> Dict[str, bool]:
        return {
            "monotone_increasing": self.monotone_increasing,
            "continuous": self.continuous,
            "upper_semicontinuous": self.upper_semicontinuous,
        }

    def piece_at(self, t: Fraction) -> CFPiece:
        i = bisect_right(self._keys, (1, t, 0)) - 1
        return self.pieces[i]

    def __call__(self, t) -> Fraction:
        return evaluate_cf(self, t)

    def breakpoints(self) -> List[Fraction]:
        pts = set()
        for p in self.pieces:
            for e in (p.guard.lo, p.guard.hi):
                if e is not None:
                    pts.add(e)
        return sorted(pts)

    def left_limit(self, b: Fraction) -> Optional[Fraction]:
        return _side_value(self, b, left=True)

    def right_limit(self, b: Fraction) -> Optional[Fraction]:
        return _side_value(self, b, left=False)


def _side_value(cf: ControlFunction, b: Fraction, left: bool) -> Optional[Fraction]:
    for p in cf.pieces:
        near = p.guard.has_left_nbhd(b) if left else p.guard.has_right_nbhd(b)
        if near:
            if isinstance(p.form, Mobius) and p.form.c * b + p.form.d == 0:
                return None  # blows up at b
            return p.form(b)
    return None


def validate_control(cf: ControlFunction) -> None:
    for p in cf.pieces:
        pole = p.form.pole
        if pole is not None and p.guard.contains(pole):
            raise PoleInGuard(f"control piece on {p.guard} contains its pole {pole}")
    for p, q in zip(cf.pieces, cf.pieces[1:]):
        overlap = p.guard.intersect(q.guard)
        if overlap is not None:
            raise TotalityError("control guards overlap", overlap.lo)
    ok, gap = subset_of(DomainSet([HALF_LINE]), DomainSet([p.guard for p in cf.pieces]))
    if not ok:
        raise TotalityError("control function is not total on [0, inf)", gap)
    v0 = cf.piece_at(ZERO).form(ZERO)
    if v0 != 0:
        raise ValueError(f"control function must vanish at 0, got {v0}")


def evaluate_cf(c: ControlFunction, t) -> Fraction:
    t = scalar(t)
    if t < 0:
        raise NegativeArgument(f"control function evaluated at {t} < 0")
    return c.piece_at(t).form(t)


# ------------------------------------------------------------ constructors

def linear(r, name: str = "psi") -> ControlFunction:
    """t -> r t."""
    r = scalar(r)
    form = Constant(0) if r == 0 else Mobius(r, 0)
    flags = dict(monotone_increasing=r >= 0, continuous=True, upper_semicontinuous=True)
    return ControlFunction((CFPiece(HALF_LINE, form),), name=name, **flags)


def identity() -> ControlFunction:
    return linear(1, name="id")


def from_table(knots: Sequence[Tuple[Fraction, Fraction]], tail_slope: Fraction, name: str = "psi") -> ControlFunction:
    """A table on [0, t_last] continued linearly with `tail_slope` beyond."""
    table = LinearTable(tuple(knots))
    t_n, v_n = table.knots[-1]
    pieces = [CFPiece(Interval(0, t_n, True, True), table)]
    tail = Constant(v_n) if tail_slope == 0 else Mobius(tail_slope, v_n - tail_slope * t_n)
    pieces.append(CFPiece(Interval(t_n, None, False, False), tail))
    return ControlFunction(tuple(pieces), monotone_increasing=True, continuous=True,
                           upper_semicontinuous=True, name=name)


# -------------------------------------------------------------- regularity

@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class RegularityReport:
    monotone: Verdict
    continuous_at_breakpoints: Verdict
    usc_at_breakpoints: Verdict
    strictly_below_identity: Verdict
    dominates: Optional[Verdict] = None

    @property
    def all_green(self) -> bool:
        checks = [self.monotone, self.continuous_at_breakpoints, self.usc_at_breakpoints,
                  self.strictly_below_identity]
        if self.dominates is not None:
            checks.append(self.dominates)
        return all(v.ok for v in checks)


def _grid_points(grid) -> List[Fraction]:
    pts = [scalar(t) for t in (grid.points if isinstance(grid, SampleSet) else grid)]
    if pts and pts[0] > 0 and all(a < b for a, b in zip(pts, pts[1:])):
        return pts  # already a clean grid; skip the set round trip
    return sorted({t for t in pts if t > 0})


def _interior_pair(g: Interval) -> Tuple[Fraction, Fraction]:
    lo = g.lo if g.lo is not None else (g.hi - 2 if g.hi is not None else Fraction(0))
    if g.hi is None:
        return lo + 1, lo + 2
    w = g.hi - lo
    return lo + w / 3, lo + 2 * w / 3


def _drop_witness(cf: ControlFunction, b: Fraction, left: bool) -> Tuple[Fraction, Fraction]:
    """A pair t1 < t2 near b with cf(t1) > cf(t2), given a one-sided limit jump at b."""
    vb = cf(b)
    delta = Fraction(1)
    for _ in range(200):
        t = b - delta if left else b + delta
        if t >= 0:
            vt = cf(t)
            if left and vt > vb:
                return (t, b)
            if not left and vt < vb:
                return (b, t)
        delta /= 2
    return (b, b)


def check_regularity(c: ControlFunction, grid) -> RegularityReport:
    return _regularity(c, _grid_points(grid))[0]


def _regularity(c: ControlFunction, ts: List[Fraction]) -> Tuple[RegularityReport, Dict[Fraction, Fraction]]:
    """The report plus the grid values it was computed from."""
    bps = c.breakpoints()

    monotone = Verdict(True)
    vals = [c(t) for t in ts]
    known = dict(zip(ts, vals))
    for (t1, v1), (t2, v2) in zip(zip(ts, vals), zip(ts[1:], vals[1:])):
        if v2 < v1:
            monotone = Verdict(False, (t1, t2))
            break
    if monotone.ok:
        for p in c.pieces:
            f = p.form
            if isinstance(f, Mobius) and f.det < 0 and not p.guard.is_point:
                monotone = Verdict(False, _interior_pair(p.guard))
                break
            if isinstance(f, LinearTable):
                bad = [(a[0], b[0]) for a, b, s in zip(f.knots, f.knots[1:], f.slopes()) if s < 0]
                if bad:
                    monotone = Verdict(False, bad[0])
                    break
    if monotone.ok:
        for b in bps:
            left, right, vb = c.left_limit(b), c.right_limit(b), c(b)
            if left is not None and left > vb:
                monotone = Verdict(False, _drop_witness(c, b, left=True))
                break
            if right is not None and right < vb:
                monotone = Verdict(False, _drop_witness(c, b, left=False))
                break

    continuous = Verdict(True)
    usc = Verdict(True)
    for b in bps:
        vb = c(b)
        # at 0 the ray has no left side; None otherwise means a pole
        left = c.left_limit(b) if _has_left(c, b) else vb
        right = c.right_limit(b)
        sides = (left, right)
        if continuous.ok and any(s is None or s != vb for s in sides):
            continuous = Verdict(False, b)
        if usc.ok and any(s is None or s > vb for s in sides):
            usc = Verdict(False, b)

    below = Verdict(True)
    for t in sorted(set(ts) | {b for b in bps if b > 0}):
        if t not in known:
            known[t] = c(t)
        if known[t] >= t:
            below = Verdict(False, t)
            break
    return RegularityReport(monotone, continuous, usc, below), known


def _has_left(c: ControlFunction, b: Fraction) -> bool:
    return any(p.guard.has_left_nbhd(b) for p in c.pieces)


# --------------------------------------------------------------- synthesis

def dominate_ratio_by_continuous(alpha: Callable[[Fraction], Fraction], grid) -> ControlFunction:
    """Continuous piecewise-linear beta with alpha <= beta < 1 at every grid point.

    Each knot takes the largest alpha among itself and its two neighbours and
    averages it with 1, so a jump in alpha is covered on both adjacent spans.
    """
    ts = _grid_points(grid)
    alphas = []
    for t in ts:
        a = alpha(t)
        if a >= 1:
            raise RatioReachesOne(t, a)
        alphas.append(a)
    knots = []
    for i, t in enumerate(ts):
        local = max(alphas[max(i - 1, 0): i + 2])
        knots.append((t, (local + 1) / 2))
    table = LinearTable(tuple(knots))
    t0, tn = ts[0], ts[-1]
    pieces = [
        CFPiece(Interval(0, 0, True, True), Constant(0)),
        CFPiece(Interval(0, t0, False, False), Constant(knots[0][1])),
        CFPiece(Interval(t0, tn, True, True), table),
        CFPiece(Interval(tn, None, False, False), Constant(knots[-1][1])),
    ]
    # beta only matters on (0, inf); the value 0 at 0 is the ray convention.
    return ControlFunction(tuple(pieces), name="beta")


def monotone_envelope(c: Callable[[Fraction], Fraction], grid) -> ControlFunction:
    """Monotone continuous psi with c <= psi < id on the grid."""
    ts = _grid_points(grid)
    knots = [(ZERO, ZERO)]
    prev = ZERO
    for t in ts:
        v = c(t)
        if v >= t:
            raise EnvelopeImpossible(t, v)
        psi = max(v, prev)
        if psi >= t:
            # unreachable under the precondition; kept as a guard
            psi = (prev + t) / 2
        knots.append((t, psi))
        prev = psi
    table = LinearTable(tuple(knots))
    slopes = table.slopes()
    tail = min(slopes[-1], Fraction(1)) if slopes else Fraction(0)
    return from_table(table.knots, max(tail, ZERO))


def synthesize_psi(phi: ControlFunction, grid) -> Tuple[ControlFunction, RegularityReport]:
    """Dominate phi by a monotone continuous psi below the identity.

    Pipeline: alpha = phi/t, continuous beta >= alpha, chi = t*beta,
    monotone envelope of chi. The certificate is checked on the grid.
    """
    # phi's own breakpoints join the grid so its jumps are dominated exactly
    ts = _grid_points(list(_grid_points(grid)) + [b for b in phi.breakpoints() if b > 0])
    phis = {t: phi(t) for t in ts}
    beta = dominate_ratio_by_continuous(lambda t: phis[t] / t, ts)
    psi = monotone_envelope(lambda t: t * beta(t), ts)
    cert, psis = _regularity(psi, ts)
    dominated = Verdict(True)
    for t in ts:
        if phis[t] > psis[t]:
            dominated = Verdict(False, t)
            break
    cert.dominates = dominated
    return psi, cert
