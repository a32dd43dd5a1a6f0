"""Jungck-type iteration and the common-fixed-point pipeline.

The trace interleaves the two coincidence equations

    y_{2n} = T x_{2n} = f x_{2n+1},   y_{2n+1} = T x_{2n+1} = g x_{2n+2},

choosing preimages deterministically (nearest to the previous x). The
pipeline then checks each hypothesis in turn and reports the first one that
fails, with a witness, instead of assuming it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .compat import commutes_on_set, fixed_set_intersection, is_weakly_compatible
from .conditions import Main, check_condition
from .control import ControlFunction, Verdict
from .domain import DomainSet, GeometricSeq, Interval, PointSet, closure, is_complete, scalar, subset_of
from .errors import NoPreimage, PreimageFailure
from .maps import MapFamily, PiecewiseMap, coincidence_points, iterate_map, sample_for_maps

DEFAULT_TOL = Fraction(1, 10 ** 12)
DEFAULT_MAX_ITER = 10_000

CONSTANT_TAIL = "ConstantTail"
ALPHA_BELOW_TOL = "AlphaBelowTol"
MAX_ITERATIONS = "MaxIterations"
PREIMAGE_FAILURE = "PreimageFailure"

UNIQUE_POINT = "UniquePoint"
HYPOTHESIS_FAILED = "HypothesisFailed"
NO_LIMIT_IN_SPACE = "NoLimitInSpace"
COMMUTE_FAILURE = "CommuteFailure"


@dataclass(frozen=True)
class PreimageChoice:
    step: int
    target: Fraction
    map_name: str
    candidates: Tuple[Fraction, ...]
    chosen: Fraction


@dataclass
class IterationTrace:
    x_seq: List[Fraction]
    y_seq: List[Fraction]
    alpha_seq: List[Fraction]
    terminated_by: str
    preimage_choices: List[PreimageChoice] = field(default_factory=list)
    failure: Optional[PreimageFailure] = None

    def rows(self):
        """(n, x_n, y_n, alpha_n) with alpha blank past the last step."""
        for n, (x, y) in enumerate(zip(self.x_seq, self.y_seq)):
            a = self.alpha_seq[n] if n < len(self.alpha_seq) else None
            yield n, x, y, a


def _nearest_in(S: DomainSet, x: Fraction, edge_offset: Optional[Fraction]) -> Fraction:
    best = None
    for comp in S.components:
        if isinstance(comp, Interval):
            if comp.contains(x):
                cand = x
            else:
                off = edge_offset if edge_offset is not None else (comp.length / 1000 if comp.bounded else 1)
                if comp.bounded:
                    off = min(off, comp.length / 2)
                if comp.hi is not None and x >= comp.hi:
                    cand = comp.hi if comp.hi_closed else comp.hi - off
                else:
                    cand = comp.lo if comp.lo_closed else comp.lo + off
            cands = [cand]
        elif isinstance(comp, PointSet):
            cands = list(comp.points)
        else:
            cands = list(comp.terms(64)) + ([comp.limit] if comp.includes_limit else [])
        for c in cands:
            if best is None or (abs(c - x), c) < (abs(best - x), best):
                best = c
    return best


def _choose(m: PiecewiseMap, target: Fraction, prev: Fraction, edge_offset) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    cands = []
    for p in m.preimages(target):
        cands.append(p.point if p.continuum is None else _nearest_in(p.continuum, prev, edge_offset))
    chosen = min(cands, key=lambda c: (abs(c - prev), c))
    return chosen, tuple(cands)


def run_jungck(T: PiecewiseMap, f: PiecewiseMap, g: Optional[PiecewiseMap] = None, x0=None, *,
               policy: str = "nearest", max_iter: int = DEFAULT_MAX_ITER, tol=DEFAULT_TOL,
               edge_offset=None, raise_on_failure: bool = True) -> IterationTrace:
    """Build the interleaved sequence from x0 until it stabilizes, converges, or runs out."""
    if policy != "nearest":
        raise ValueError(f"unknown preimage policy {policy!r}")
    g = f if g is None else g
    tol = scalar(tol)
    x = scalar(x0)
    xs, ys, alphas = [x], [T(x)], []
    choices: List[PreimageChoice] = []
    terminated = MAX_ITERATIONS
    failure = None
    for k in range(max_iter):
        m = f if k % 2 == 0 else g
        target = ys[-1]
        try:
            x, cands = _choose(m, target, xs[-1], edge_offset)
        except NoPreimage:
            failure = PreimageFailure(target, m.name, k)
            if raise_on_failure:
                raise failure
            terminated = PREIMAGE_FAILURE
            break
        choices.append(PreimageChoice(k, target, m.name, cands, x))
        xs.append(x)
        ys.append(T(x))
        a = abs(ys[-1] - ys[-2])
        alphas.append(a)
        if a == 0 and len(alphas) >= 2 and alphas[-2] == 0:
            terminated = CONSTANT_TAIL
            break
        if 0 < a < tol:
            terminated = ALPHA_BELOW_TOL
            break
    return IterationTrace(xs, ys, alphas, terminated, choices, failure)


def limit_candidate(trace: IterationTrace, T: Optional[PiecewiseMap] = None,
                    f: Optional[PiecewiseMap] = None) -> Optional[Fraction]:
    """Exact limit of the y-sequence when its tail is constant or exactly geometric."""
    ys = trace.y_seq
    if trace.terminated_by == CONSTANT_TAIL:
        return ys[-1]
    d = [b - a for a, b in zip(ys, ys[1:])]
    if len(d) >= 3 and d[-3] != 0 and d[-2] != 0:
        r1, r2 = d[-2] / d[-3], d[-1] / d[-2]
        if r1 == r2 and abs(r2) < 1:
            return ys[-2] + d[-1] / (1 - r2)
    if len(d) >= 4 and d[-4] != 0 and d[-3] != 0:
        R1, R2 = d[-2] / d[-4], d[-1] / d[-3]
        if R1 == R2 and abs(R2) < 1:
            return ys[-3] + (d[-2] + d[-1]) / (1 - R2)
    if T is not None and f is not None:
        values = [T(c) for c in coincidence_points(T, f).isolated_points()]
        if values:
            return min(values, key=lambda v: (abs(v - ys[-1]), v))
    return None


def verify_alpha_descent(trace, psi: ControlFunction) -> Verdict:
    """alpha_{n+1} <= psi(alpha_n) < alpha_n at every step with alpha_n > 0."""
    alphas = trace.alpha_seq if isinstance(trace, IterationTrace) else [scalar(a) for a in trace]
    for n, (a, b) in enumerate(zip(alphas, alphas[1:])):
        if a == 0:
            continue
        bound = psi(a)
        if not (b <= bound < a):
            return Verdict(False, n)
    return Verdict(True)


@dataclass
class CauchyReport:
    tail_diameters: List[Fraction]
    first_index: Optional[int]
    eps: Fraction


def cauchy_diagnostics(trace: IterationTrace, eps) -> CauchyReport:
    """Diameter of {y_m : m >= n} for each n, and the first n where it drops below eps."""
    eps = scalar(eps)
    ys = trace.y_seq
    diam: List[Fraction] = [Fraction(0)] * len(ys)
    hi = lo = ys[-1]
    for n in range(len(ys) - 1, -1, -1):
        hi, lo = max(hi, ys[n]), min(lo, ys[n])
        diam[n] = hi - lo
    first = next((n for n, v in enumerate(diam) if v < eps), None)
    return CauchyReport(diam, first, eps)


# ----------------------------------------------------------------- pipeline

@dataclass
class PipelineConfig:
    x0: Optional[Fraction] = None
    psi: Optional[ControlFunction] = None
    resolution: int = 64
    edge_offset: Optional[Fraction] = None
    tol: Fraction = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    policy: str = "nearest"


@dataclass
class CommonFixedPointResult:
    status: str
    z: Optional[Fraction] = None
    which: Optional[str] = None
    witness: Any = None
    escaping_to: Optional[Fraction] = None
    coincidence_u: Optional[Fraction] = None
    coincidence_v: Optional[Fraction] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    trace: Optional[IterationTrace] = None


def _default_x0(domain: DomainSet) -> Fraction:
    c = domain.components[0]
    if isinstance(c, Interval):
        return c.midpoint
    if isinstance(c, PointSet):
        return c.points[0]
    return c.term(0)


def _pick(S: DomainSet, near: Fraction) -> Optional[Fraction]:
    return None if S.is_empty() else _nearest_in(S, near, None)


def common_fixed_point(T: PiecewiseMap, f: PiecewiseMap, g: Optional[PiecewiseMap] = None,
                       config: Optional[PipelineConfig] = None) -> CommonFixedPointResult:
    """Check the hypotheses one stage at a time, then iterate to the common fixed point."""
    cfg = config or PipelineConfig()
    two_maps = g is None or g is f
    g = f if g is None else g
    diag: Dict[str, Any] = {}

    def failed(which, witness=None, **kw):
        return CommonFixedPointResult(HYPOTHESIS_FAILED, which=which, witness=witness, diagnostics=diag, **kw)

    TK, fK, gK = T.image(), f.image(), g.image()
    target = fK if two_maps else fK.intersect(gK)

    # 1. inclusion; for a pair, T(K) inside f(K) is enough (f(K) complete makes it closed)
    lhs = TK if two_maps else closure(TK)
    ok, w = subset_of(lhs, target)
    diag["inclusion"] = {"ok": ok, "witness": w, "lhs": str(lhs), "rhs": str(target)}
    if not ok:
        return failed("inclusion", w)

    # 2. completeness of at least one candidate set
    candidates = {"T(K)": TK, "f(K)": fK} if two_maps else {"closure(T(K))": closure(TK), "f(K)": fK, "g(K)": gK}
    verdicts = {name: is_complete(S) for name, S in candidates.items()}
    complete = any(v[0] for v in verdicts.values())
    diag["completeness"] = {n: {"ok": v[0], "witness": v[1]} for n, v in verdicts.items()}
    completeness_witness = None if complete else next(v[1] for v in verdicts.values())

    # 3. contractive condition
    if cfg.psi is not None:
        samples = sample_for_maps(T.domain, [T, f, g], cfg.resolution, cfg.edge_offset)
        rep = check_condition(Main(cfg.psi), T, f, g, samples)
        diag["condition"] = {"holds": rep.holds, "pairs": rep.pairs_checked, "min_margin": rep.min_margin,
                             "witness": rep.violation_witness}
        if not rep.holds:
            return failed("condition", rep.violation_witness)
    else:
        diag["condition"] = "skipped"

    # 4. weak compatibility
    for label, m in (("T,f", f), ("T,g", g)):
        v = is_weakly_compatible(T, m)
        diag[f"weak_compatibility[{label}]"] = {"ok": v.ok, "level": v.level}
        if not v.ok:
            return failed("weak_compatibility", v.witness)
        if two_maps:
            break

    # 5. iterate
    x0 = scalar(cfg.x0) if cfg.x0 is not None else _default_x0(T.domain)
    try:
        trace = run_jungck(T, f, g, x0, policy=cfg.policy, max_iter=cfg.max_iter, tol=cfg.tol,
                           edge_offset=cfg.edge_offset)
    except PreimageFailure as exc:
        return failed("iteration", exc.target)
    diag["iteration"] = {"steps": len(trace.alpha_seq), "terminated_by": trace.terminated_by}
    z = limit_candidate(trace, T, f)
    if z is None:
        return failed("limit", trace.y_seq[-1], trace=trace)
    if not target.contains(z):
        return CommonFixedPointResult(NO_LIMIT_IN_SPACE, escaping_to=z, diagnostics=diag, trace=trace,
                                      which="completeness" if not complete else None,
                                      witness=completeness_witness)
    if not complete:
        return failed("completeness", completeness_witness, trace=trace)

    # 6. coincidence points u, v with fu = Tu = z = Tv = gv
    U = f.preimage_set(z).intersect(T.preimage_set(z))
    V = g.preimage_set(z).intersect(T.preimage_set(z))
    u, v = _pick(U, z), _pick(V, z)
    if u is None:
        return failed("coincidence_u", z, trace=trace)
    if v is None:
        return failed("coincidence_v", z, trace=trace)

    # 7. z itself
    values = (T(z), f(z), g(z)) if T.domain.contains(z) else None
    if values is None or any(val != z for val in values):
        return failed("fixed_point", values, trace=trace, z=z)

    # 8. uniqueness
    F = fixed_set_intersection([T, f] if two_maps else [T, f, g])
    diag["fixed_set"] = str(F)
    if F != DomainSet.points([z]):
        return failed("uniqueness", str(F), trace=trace, z=z, coincidence_u=u, coincidence_v=v)
    return CommonFixedPointResult(UNIQUE_POINT, z=z, coincidence_u=u, coincidence_v=v, diagnostics=diag,
                                  trace=trace)


@dataclass
class IteratedResult:
    status: str
    z: Optional[Fraction]
    power_result: CommonFixedPointResult
    fixed_set: str
    commute: Any
    witness: Any = None


def iterated_common_fixed_point(T: PiecewiseMap, f: PiecewiseMap, m: int,
                                config: Optional[PipelineConfig] = None) -> IteratedResult:
    """Common fixed point of T^m and f, lifted to T when T and f commute on F(T^m) & F(f)."""
    Tm = iterate_map(T, m)
    power = common_fixed_point(Tm, f, None, config)
    F = fixed_set_intersection([Tm, f])
    commute = commutes_on_set(T, f, F)
    if not commute.ok:
        w = commute.witness
        return IteratedResult(COMMUTE_FAILURE, power.z, power, str(F), commute, (w.point, w.Tf, w.fT))
    if power.status != UNIQUE_POINT:
        return IteratedResult(power.status, power.z, power, str(F), commute, power.witness)
    z = power.z
    if T(z) != z:
        return IteratedResult(HYPOTHESIS_FAILED, z, power, str(F), commute, ("T(z)", T(z)))
    return IteratedResult(UNIQUE_POINT, z, power, str(F), commute)


@dataclass
class FamilyResult:
    status: str
    z: Optional[Fraction]
    base_result: CommonFixedPointResult
    values: Dict[int, Fraction] = field(default_factory=dict)
    failures: List[Tuple[int, Fraction]] = field(default_factory=list)


def family_common_fixed_point(family: MapFamily, f: PiecewiseMap, indices: Sequence[int],
                              config: Optional[PipelineConfig] = None) -> FamilyResult:
    """Fixed point z of (T_1, f), then T_j(z) = z checked for every listed j."""
    base = common_fixed_point(family(1), f, None, config)
    if base.status != UNIQUE_POINT:
        return FamilyResult(base.status, base.z, base)
    z = base.z
    values = {j: family(j)(z) for j in indices}
    failures = [(j, v) for j, v in values.items() if v != z]
    return FamilyResult(HYPOTHESIS_FAILED if failures else UNIQUE_POINT, z, base, values, failures)
