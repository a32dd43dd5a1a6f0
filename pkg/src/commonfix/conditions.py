"""Contractive inequalities d(Tx, Ty) <= bound(kernel(x, y)) checked pair by pair.

Each variant splits its right-hand side into a *kernel* (the distance
expression fed to the coefficient or control function) and a *bound*
(r * kernel, or phi(kernel)). That split is what `worst_ratio` uses to ask
"which coefficient would be needed", and what `implication_probe` compares.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .control import ControlFunction
from .domain import SampleSet, metric_distance as d, scalar
from .errors import AllKernelsZero
from .maps import MapFamily, PiecewiseMap, iterate_map, sample_for_maps


@dataclass(frozen=True)
class PairValues:
    """Map values at a pair; Ty may come from a different family member than Tx."""

    x: Fraction
    y: Fraction
    Tx: Fraction
    Ty: Fraction
    fx: Fraction
    fy: Fraction
    gx: Fraction
    gy: Fraction

    @property
    def lhs(self) -> Fraction:
        return d(self.Tx, self.Ty)


def _max4_two_map(p: PairValues) -> Fraction:
    return max(d(p.fx, p.fy), d(p.Tx, p.fx), d(p.Ty, p.fy), (d(p.Tx, p.fy) + d(p.Ty, p.fx)) / 2)


def _block_fg(p: PairValues) -> Fraction:
    return max(d(p.fx, p.gy), d(p.Tx, p.fx), d(p.Ty, p.gy), (d(p.Tx, p.gy) + d(p.Ty, p.fx)) / 2)


def _block_gf(p: PairValues) -> Fraction:
    return max(d(p.fy, p.gx), d(p.Tx, p.gx), d(p.Ty, p.fy), (d(p.Tx, p.fy) + d(p.Ty, p.gx)) / 2)


def _unit_coefficient(name: str, v) -> Fraction:
    v = scalar(v)
    if not 0 <= v < 1:
        raise ValueError(f"{name} must lie in [0, 1), got {v}")
    return v


class Condition:
    """Base class; subclasses define `kernel` and `bound`."""

    label = "condition"
    three_maps = False
    uses_control = False

    def kernel(self, p: PairValues) -> Fraction:
        raise NotImplementedError

    def bound(self, k: Fraction) -> Fraction:
        raise NotImplementedError

    def rhs(self, p: PairValues) -> Fraction:
        return self.bound(self.kernel(p))


class _Scaled(Condition):
    def bound(self, k):
        return self.r * k


class _Controlled(Condition):
    uses_control = True

    def bound(self, k):
        return self.control(k)


@dataclass(frozen=True)
class Jungck(_Scaled):
    """d(Tx,Ty) <= r d(fx,fy)."""

    r: Fraction
    label = "jungck"

    def __post_init__(self):
        object.__setattr__(self, "r", _unit_coefficient("r", self.r))

    def kernel(self, p):
        return d(p.fx, p.fy)


@dataclass(frozen=True)
class Singh(Condition):
    """a[d(Tx,fx)+d(Ty,fy)] + b[d(Tx,fy)+d(Ty,fx)] + c d(fx,fy); kernel is that sum over 2a+2b+c."""

    a: Fraction
    b: Fraction
    c: Fraction
    label = "singh"

    def __post_init__(self):
        for n in "abc":
            v = scalar(getattr(self, n))
            if v < 0:
                raise ValueError(f"{n} must be nonnegative")
            object.__setattr__(self, n, v)
        if not 0 < self.weight < 1:
            raise ValueError(f"need 0 < 2a+2b+c < 1, got {self.weight}")

    @property
    def weight(self) -> Fraction:
        return 2 * self.a + 2 * self.b + self.c

    def kernel(self, p):
        s = (self.a * (d(p.Tx, p.fx) + d(p.Ty, p.fy)) + self.b * (d(p.Tx, p.fy) + d(p.Ty, p.fx))
             + self.c * d(p.fx, p.fy))
        return s / self.weight

    def bound(self, k):
        return self.weight * k


@dataclass(frozen=True)
class BabuMax(_Scaled):
    r: Fraction
    label = "babu_max"

    def __post_init__(self):
        object.__setattr__(self, "r", _unit_coefficient("r", self.r))

    def kernel(self, p):
        return _max4_two_map(p)


@dataclass(frozen=True)
class Som(Condition):
    """Five-coefficient family inequality; Tx is T_i x and Ty is T_j y."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a5: Fraction
    pair_indices: Tuple[int, int] = (1, 1)
    label = "som"

    def __post_init__(self):
        for n in ("a1", "a2", "a3", "a4", "a5"):
            v = scalar(getattr(self, n))
            if v < 0:
                raise ValueError(f"{n} must be nonnegative")
            object.__setattr__(self, n, v)
        if not self.total < 1:
            raise ValueError(f"need a1+...+a5 < 1, got {self.total}")

    @property
    def total(self) -> Fraction:
        return self.a1 + self.a2 + self.a3 + self.a4 + self.a5

    def kernel(self, p):
        s = (self.a1 * d(p.Tx, p.fx) + self.a2 * d(p.Ty, p.fy) + self.a3 * d(p.Tx, p.fy)
             + self.a4 * d(p.Ty, p.fx) + self.a5 * d(p.fx, p.fy))
        return s / self.total if self.total else Fraction(0)

    def bound(self, k):
        return self.total * k


@dataclass(frozen=True)
class BabuTriple(Condition):
    c1: Fraction
    label = "babu_triple"

    def __post_init__(self):
        object.__setattr__(self, "c1", _unit_coefficient("c1", self.c1))

    def kernel(self, p):
        return max(d(p.Tx, p.fy), d(p.Ty, p.fx), d(p.fx, p.fy))

    def bound(self, k):
        return self.c1 * k


@dataclass(frozen=True)
class BoydWong(_Controlled):
    """d(Tx,Ty) <= phi(d(fx,gy)); note the kernel is not symmetric in (x, y)."""

    control: ControlFunction
    label = "boyd_wong"
    three_maps = True

    def kernel(self, p):
        return d(p.fx, p.gy)


@dataclass(frozen=True)
class SongGen(_Scaled):
    r: Fraction
    label = "song"
    three_maps = True

    def __post_init__(self):
        object.__setattr__(self, "r", _unit_coefficient("r", self.r))

    def kernel(self, p):
        return max(d(p.Tx, p.fx), d(p.Ty, p.gy), (d(p.Tx, p.gy) + d(p.Ty, p.fx)) / 2, d(p.fx, p.gy))


@dataclass(frozen=True)
class MinBoydWong(_Controlled):
    control: ControlFunction
    label = "min_boyd_wong"
    three_maps = True

    def kernel(self, p):
        return min(d(p.fx, p.gy), d(p.fy, p.gx))


@dataclass(frozen=True)
class MinSong(_Scaled):
    """r * min of the two max blocks.

    The second block uses d(Ty, fy), mirroring the main inequality, so that
    swapping x and y swaps the blocks.
    """

    r: Fraction
    label = "min_song"
    three_maps = True
    note = "min_song reads the half-sum as (d(Tx,gy) + d(Ty,fx))/2 and its second block with d(Ty,fy)"

    def __post_init__(self):
        object.__setattr__(self, "r", _unit_coefficient("r", self.r))

    def kernel(self, p):
        return min(_block_fg(p), _block_gf(p))


@dataclass(frozen=True)
class Main(_Controlled):
    """d(Tx,Ty) <= psi(min{max-block(f,g), max-block(g,f)})."""

    control: ControlFunction
    label = "main"
    three_maps = True

    def kernel(self, p):
        return min(_block_fg(p), _block_gf(p))


@dataclass(frozen=True)
class TwoMapMax(_Controlled):
    control: ControlFunction
    label = "two_map_max"

    def kernel(self, p):
        return _max4_two_map(p)


@dataclass(frozen=True)
class IteratedTwoMap(_Controlled):
    """TwoMapMax applied to the power T^m."""

    control: ControlFunction
    m: int = 1
    label = "iterated_two_map"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("power m must be positive")

    def kernel(self, p):
        return _max4_two_map(p)


@dataclass(frozen=True)
class FamilyTwoMap(_Controlled):
    """TwoMapMax with T_1 at x and T_j at y."""

    control: ControlFunction
    j: int = 1
    label = "family_two_map"

    def kernel(self, p):
        return _max4_two_map(p)


COEFFICIENT_SCALED = (Jungck, Singh, BabuMax, Som, BabuTriple, SongGen, MinSong)


# ------------------------------------------------------------------ checks

def _effective_maps(cond: Condition, T: PiecewiseMap, f: PiecewiseMap, g: Optional[PiecewiseMap],
                    Tj: Optional[PiecewiseMap]):
    if isinstance(cond, IteratedTwoMap) and cond.m > 1:
        T = iterate_map(T, cond.m)
    g = g if (g is not None and cond.three_maps) else f
    return T, f, g, (Tj if Tj is not None else T)


def pair_values(x, y, T, f, g, Tj=None) -> PairValues:
    Tj = T if Tj is None else Tj
    return PairValues(x, y, T(x), Tj(y), f(x), f(y), g(x), g(y))


def rhs_bound(cond: Condition, x, y, T: PiecewiseMap, f: PiecewiseMap,
              g: Optional[PiecewiseMap] = None, Tj: Optional[PiecewiseMap] = None) -> Fraction:
    """Exact right-hand side of `cond` at (x, y)."""
    T, f, g, Tj = _effective_maps(cond, T, f, g, Tj)
    return cond.rhs(pair_values(scalar(x), scalar(y), T, f, g, Tj))


@dataclass(frozen=True)
class Violation:
    x: Fraction
    y: Fraction
    lhs: Fraction
    rhs: Fraction
    kernel: Fraction
    j: Optional[int] = None


@dataclass
class CheckReport:
    holds: bool
    pairs_checked: int
    violation_witness: Optional[Violation]
    violations: List[Violation]
    min_margin: Optional[Fraction]
    distance_set: List[Fraction]
    condition: str = ""


class _Table:
    """Map values precomputed once per sample point."""

    def __init__(self, pts, T, f, g, Tj):
        self.pts = list(pts)
        self.T = {x: T(x) for x in self.pts}
        self.Tj = self.T if Tj is T else {x: Tj(x) for x in self.pts}
        self.f = {x: f(x) for x in self.pts}
        self.g = self.f if g is f else {x: g(x) for x in self.pts}

    def pair(self, x, y) -> PairValues:
        return PairValues(x, y, self.T[x], self.Tj[y], self.f[x], self.f[y], self.g[x], self.g[y])

    def pairs(self):
        for x in self.pts:
            for y in self.pts:
                yield self.pair(x, y)


def _points(samples, T, f, g):
    if samples is None:
        maps = [m for m in (T, f, g) if m is not None]
        samples = sample_for_maps(T.domain, maps)
    return samples.points if isinstance(samples, SampleSet) else [scalar(s) for s in samples]


def check_condition(cond: Condition, T: PiecewiseMap, f: PiecewiseMap, g: Optional[PiecewiseMap] = None,
                    samples=None, *, family: Optional[MapFamily] = None,
                    indices: Optional[Sequence[int]] = None) -> CheckReport:
    """Evaluate lhs <= rhs over all ordered sample pairs, in a fixed order."""
    pts = _points(samples, T, f, g)
    runs: List[Tuple[Optional[int], PiecewiseMap, PiecewiseMap]] = []
    if isinstance(cond, FamilyTwoMap) and family is not None:
        T1 = family(1)
        for j in (indices if indices is not None else [cond.j]):
            runs.append((j, T1, family(j)))
    else:
        runs.append((None, T, None))

    violations: List[Violation] = []
    margin: Optional[Fraction] = None
    distances = set()
    count = 0
    for j, TT, Tj in runs:
        T_eff, f_eff, g_eff, Tj_eff = _effective_maps(cond, TT, f, g, Tj)
        table = _Table(pts, T_eff, f_eff, g_eff, Tj_eff)
        for p in table.pairs():
            count += 1
            k = cond.kernel(p)
            r = cond.bound(k)
            distances.add(k)
            lhs = p.lhs
            gap = r - lhs
            margin = gap if margin is None or gap < margin else margin
            if lhs > r:
                violations.append(Violation(p.x, p.y, lhs, r, k, j))
    return CheckReport(
        holds=not violations,
        pairs_checked=count,
        violation_witness=violations[0] if violations else None,
        violations=violations,
        min_margin=margin,
        distance_set=sorted(distances),
        condition=cond.label,
    )


@dataclass
class WorstRatio:
    sup_ratio: Optional[Fraction]
    witness: Optional[Tuple[Fraction, Fraction]]
    infinite_witnesses: List[Tuple[Fraction, Fraction, Fraction]] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        """Some coefficient in [0, 1) works on the sampled pairs."""
        return not self.infinite_witnesses and (self.sup_ratio is None or self.sup_ratio < 1)


def worst_ratio(cond: Condition, T: PiecewiseMap, f: PiecewiseMap, g: Optional[PiecewiseMap] = None,
                samples=None, Tj: Optional[PiecewiseMap] = None) -> WorstRatio:
    """max lhs / kernel over sampled pairs with a positive kernel.

    Pairs with kernel 0 but lhs > 0 admit no finite coefficient and are
    listed separately. Ties keep the last maximizer in pair order.
    """
    pts = _points(samples, T, f, g)
    T_eff, f_eff, g_eff, Tj_eff = _effective_maps(cond, T, f, g, Tj)
    table = _Table(pts, T_eff, f_eff, g_eff, Tj_eff)
    best: Optional[Fraction] = None
    witness = None
    infinite = []
    any_signal = False
    for p in table.pairs():
        k = cond.kernel(p)
        lhs = p.lhs
        if k == 0:
            if lhs > 0:
                infinite.append((p.x, p.y, lhs))
                any_signal = True
            continue
        any_signal = True
        ratio = lhs / k
        if best is None or ratio >= best:
            best, witness = ratio, (p.x, p.y)
    if not any_signal:
        raise AllKernelsZero("every sampled pair has zero kernel and zero lhs")
    return WorstRatio(best, witness, infinite)


@dataclass
class ImplicationReport:
    holds: bool
    strong_pairs: int
    counterexamples: List[Tuple[Fraction, Fraction]]


def implication_probe(strong: Condition, weak: Condition, T: PiecewiseMap, f: PiecewiseMap,
                      g: Optional[PiecewiseMap] = None, samples=None,
                      Tj: Optional[PiecewiseMap] = None) -> ImplicationReport:
    """Wherever `strong` holds at a sampled pair, `weak` must hold too."""
    pts = _points(samples, T, f, g)
    ts = _Table(pts, *_effective_maps(strong, T, f, g, Tj))
    tw = _Table(pts, *_effective_maps(weak, T, f, g, Tj))
    bad = []
    n = 0
    for ps, pw in zip(ts.pairs(), tw.pairs()):
        if ps.lhs <= strong.rhs(ps):
            n += 1
            if pw.lhs > weak.rhs(pw):
                bad.append((ps.x, ps.y))
    return ImplicationReport(not bad, n, bad)


@dataclass
class SymmetryReport:
    symmetric: bool
    pairs_checked: int
    asymmetric_pairs: List[Tuple[Fraction, Fraction, Fraction, Fraction]]


def symmetry_audit(cond: Condition, T: PiecewiseMap, f: PiecewiseMap, g: Optional[PiecewiseMap] = None,
                   samples=None) -> SymmetryReport:
    """Compare rhs(x, y) with rhs(y, x) on every sampled pair."""
    pts = _points(samples, T, f, g)
    table = _Table(pts, *_effective_maps(cond, T, f, g, None))
    rhs: Dict[Tuple[Fraction, Fraction], Fraction] = {(p.x, p.y): cond.rhs(p) for p in table.pairs()}
    bad = []
    for (x, y), v in rhs.items():
        if x < y and rhs[(y, x)] != v:
            bad.append((x, y, v, rhs[(y, x)]))
    return SymmetryReport(not bad, len(rhs), bad)
