"""Command-line front end.

Exit status: 0 all checks green, 1 a mathematical negative (with witness),
2 bad input.
"""
from __future__ import annotations

import argparse
import dataclasses
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import conditions, control, iteration, maps
from .compat import is_compatible_on, is_reciprocal_continuous_on, is_weakly_compatible, sequence_limits
from .corpus import BUILTIN, Scenario, load_fixture, run_scenario
from .domain import closure, is_complete, scalar, subset_of
from .errors import CommonFixError, EnvelopeImpossible, FixtureInvalid, InapplicableProbe, RatioReachesOne, UnknownFixture
from .serialize import CONDITIONS, emit_control, jsonable

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2

THEOREMS = ("three-map", "pair", "iterated", "family")


class InputError(Exception):
    pass


def rational(text: str):
    try:
        return scalar(text)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _scenario(ref: str) -> Scenario:
    try:
        p = Path(ref)
        if ref.endswith(".json") or p.exists():
            return load_fixture(p.stem, p)
        return load_fixture(ref)
    except (UnknownFixture, FixtureInvalid, OSError) as exc:
        raise InputError(f"cannot load fixture {ref!r}: {exc}") from exc


def _emit(payload: Dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(jsonable(payload), indent=2) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in jsonable(payload).items():
            w.writerow([k, v if isinstance(v, str) else json.dumps(v)])
    else:
        for k, v in jsonable(payload).items():
            out.write(f"{k}: {v if isinstance(v, str) else json.dumps(v)}\n")


def _control(s: Scenario, name: Optional[str]) -> control.ControlFunction:
    if name is None:
        name = "psi" if "psi" in s.controls else "phi"
    if name not in s.controls:
        raise InputError(f"fixture has no control {name!r}")
    return s.controls[name]


def _map(s: Scenario, ref: str):
    try:
        return s.map(ref)
    except FixtureInvalid as exc:
        raise InputError(str(exc)) from exc


# ------------------------------------------------------------------ verify

def _check(name: str, ok: bool, witness: Any = None, **extra) -> Dict:
    out = {"check": name, "ok": bool(ok), "witness": witness}
    out.update(extra)
    return out


def _theorem_checks(s: Scenario, args) -> List[Dict]:
    phi = _control(s, args.control)
    reg = control.check_regularity(phi, [scalar(3) * i / 1000 for i in range(1, 1001)])
    checks = [
        _check("control_monotone", reg.monotone.ok, reg.monotone.witness),
        _check("control_continuous", reg.continuous_at_breakpoints.ok, reg.continuous_at_breakpoints.witness),
        _check("control_below_identity", reg.strictly_below_identity.ok, reg.strictly_below_identity.witness),
    ]
    T = _map(s, "T_1" if args.theorem == "family" else "T")
    f = _map(s, "f")
    if args.theorem == "three-map":
        g = _map(s, "g")
        TK, lhs, rhs = T.image(), closure(T.image()), f.image().intersect(g.image())
        sets = {"closure(T(K))": lhs, "f(K)": f.image(), "g(K)": g.image()}
        cond, ms = conditions.Main(phi), [T, f, g]
    else:
        g = None
        Tm = maps.iterate_map(T, args.power) if args.theorem == "iterated" else T
        lhs, rhs = Tm.image(), f.image()
        sets = {"T(K)": lhs, "f(K)": rhs}
        if args.theorem == "iterated":
            cond = conditions.IteratedTwoMap(phi, args.power)
        elif args.theorem == "family":
            cond = conditions.FamilyTwoMap(phi)
        else:
            cond = conditions.TwoMapMax(phi)
        ms = [Tm, f]
    ok, w = subset_of(lhs, rhs)
    checks.append(_check("inclusion", ok, w))
    verdicts = {k: is_complete(S) for k, S in sets.items()}
    checks.append(_check("completeness", any(v[0] for v in verdicts.values()),
                         {k: v[1] for k, v in verdicts.items() if not v[0]}))
    samples = maps.sample_for_maps(T.domain, ms, args.resolution, args.edge_offset)
    if args.theorem == "family":
        rep = conditions.check_condition(cond, T, f, None, samples, family=s.family("T"), indices=args.indices)
    else:
        rep = conditions.check_condition(cond, T, f, g, samples)
    vw = rep.violation_witness
    checks.append(_check("condition", rep.holds, None if vw is None else [vw.x, vw.y],
                         pairs_checked=rep.pairs_checked, min_margin=rep.min_margin,
                         lhs=None if vw is None else vw.lhs, kernel=None if vw is None else vw.kernel))
    pairs = [("T,f", ms[0], f)] + ([("T,g", T, g)] if g is not None else [])
    for label, a, b in pairs:
        v = is_weakly_compatible(a, b)
        w = v.witness
        checks.append(_check(f"weak_compatibility[{label}]", v.ok, None if w is None else [w.point, w.Tf, w.fT]))
    return checks


def cmd_verify(args, out) -> int:
    s = _scenario(args.fixture)
    if args.condition:
        variant = args.condition.replace("-", "_")
        if variant not in CONDITIONS:
            raise InputError(f"unknown condition {args.condition!r}; choose from {sorted(CONDITIONS)}")
        obj = {"variant": variant}
        cls = CONDITIONS[variant]
        fields = {f.name for f in dataclasses.fields(cls)}
        if "control" in fields:
            obj["control"] = _control(s, args.control).name
        for name in ("r", "c1"):
            if name in fields:
                if args.r is None:
                    raise InputError(f"condition {variant} needs --r")
                obj[name] = str(args.r)
        if "m" in fields:
            obj["m"] = args.power
        cond = s.condition(obj)
        names = args.maps.split(",")
        ms = [_map(s, n) for n in names]
        samp_maps = [maps.iterate_map(ms[0], args.power)] + ms[1:] if variant == "iterated_two_map" else ms
        samples = maps.sample_for_maps(ms[0].domain, samp_maps, args.resolution, args.edge_offset)
        rep = conditions.check_condition(cond, ms[0], ms[1], ms[2] if len(ms) > 2 else None, samples)
        vw = rep.violation_witness
        checks = [_check("condition", rep.holds, None if vw is None else [vw.x, vw.y],
                         pairs_checked=rep.pairs_checked, min_margin=rep.min_margin,
                         lhs=None if vw is None else vw.lhs, rhs=None if vw is None else vw.rhs,
                         kernel=None if vw is None else vw.kernel)]
        note = getattr(cond, "note", "")
    else:
        checks = _theorem_checks(s, args)
        note = ""
    first_bad = next((c for c in checks if not c["ok"]), None)
    payload = {"fixture": s.name, "ok": first_bad is None, "first_failure": first_bad, "checks": checks}
    if note:
        payload = {"note": note, **payload}
    _emit(payload, args.format, out)
    return OK if first_bad is None else NEGATIVE


# ----------------------------------------------------------------- iterate

def _trace_csv(trace: iteration.IterationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "x_n", "y_n", "alpha_n"])
    for n, x, y, a in trace.rows():
        w.writerow([n, str(x), str(y), "" if a is None else str(a)])
    return buf.getvalue()


def cmd_iterate(args, out) -> int:
    s = _scenario(args.fixture)
    cfg = iteration.PipelineConfig(x0=args.x0, resolution=args.resolution, edge_offset=args.edge_offset,
                                   max_iter=args.max_iter)
    if args.tol is not None:
        cfg.tol = args.tol
    if args.psi:
        cfg.psi = _control(s, args.psi)
    T, f = _map(s, "T"), _map(s, "f")
    if args.power and args.power > 1:
        res = iteration.iterated_common_fixed_point(T, f, args.power, cfg)
        base = res.power_result
        payload = {"fixture": s.name, "status": res.status, "z": res.z, "power": args.power,
                   "fixed_set": res.fixed_set, "witness": res.witness, "power_status": base.status}
        status = res.status
    else:
        g = s.maps.get("g")
        base = iteration.common_fixed_point(T, f, g, cfg)
        payload = {"fixture": s.name, "status": base.status, "z": base.z, "which": base.which,
                   "witness": base.witness, "escaping_to": base.escaping_to,
                   "coincidence_u": base.coincidence_u, "coincidence_v": base.coincidence_v}
        status = base.status
    trace = base.trace
    if trace is not None:
        payload["steps"] = len(trace.alpha_seq)
        payload["terminated_by"] = trace.terminated_by
        if args.trace_csv:
            Path(args.trace_csv).write_text(_trace_csv(trace))
    if args.format == "csv":
        out.write(_trace_csv(trace) if trace is not None else "n,x_n,y_n,alpha_n\n")
    else:
        _emit(payload, args.format, out)
    return OK if status == iteration.UNIQUE_POINT else NEGATIVE


# -------------------------------------------------------------- synthesize

def _source_control(args) -> control.ControlFunction:
    src = args.source
    if src == "identity":
        return control.identity()
    if src.startswith("linear:"):
        try:
            return control.linear(scalar(src.split(":", 1)[1]), name="phi")
        except (TypeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
    if "." in src and not src.endswith(".json"):
        fixture, name = src.rsplit(".", 1)
        return _control(_scenario(fixture), name)
    return _control(_scenario(src), args.control or "phi")


def cmd_synthesize(args, out) -> int:
    phi = _source_control(args)
    grid = [args.grid_hi * i / args.grid_n for i in range(1, args.grid_n + 1)]
    try:
        psi, cert = control.synthesize_psi(phi, grid)
    except (RatioReachesOne, EnvelopeImpossible) as exc:
        _emit({"ok": False, "error": type(exc).__name__, "witness": exc.args}, args.format, out)
        return NEGATIVE
    fixture = emit_control(psi)
    if args.out:
        Path(args.out).write_text(json.dumps(fixture, indent=2) + "\n")
    payload = {"ok": cert.all_green, "certificate": cert, "knots": len(psi.pieces[0].form.knots)}
    if not args.out:
        payload["psi"] = fixture
    _emit(payload, args.format, out)
    return OK if cert.all_green else NEGATIVE


# ------------------------------------------------------------------ compat

def cmd_compat(args, out) -> int:
    s = _scenario(args.fixture)
    T, f = (_map(s, n) for n in args.maps.split(","))
    payload: Dict[str, Any] = {"fixture": s.name}
    falsified = False
    weak = is_weakly_compatible(T, f)
    payload["weakly_compatible"] = weak.ok
    names = [args.witness] if args.witness else sorted(s.witnesses)
    for name in names:
        if name not in s.witnesses:
            raise InputError(f"fixture has no witness {name!r}")
        w = s.witnesses[name]
        entry: Dict[str, Any] = {"limits": sequence_limits(T, f, w).as_tuple()}
        try:
            c = is_compatible_on(T, f, w)
            r = is_reciprocal_continuous_on(T, f, w, args.t)
            entry.update(compatible=c.status, gap=c.gap, reciprocal=r.status, discrepancies=r.discrepancies)
            falsified = falsified or c.falsified or r.falsified
        except InapplicableProbe as exc:
            entry["inapplicable"] = str(exc)
        payload[f"witness[{name}]"] = entry
    _emit(payload, args.format, out)
    return NEGATIVE if falsified or not weak.ok else OK


# ------------------------------------------------------------------ corpus

def cmd_corpus(args, out) -> int:
    names = args.only or list(BUILTIN)
    reports = []
    for n in names:
        reports.append(run_scenario(_scenario(n)))
    ok = all(r.ok for r in reports)
    if args.format == "json":
        out.write(json.dumps({"ok": ok, "scenarios": [r.to_json() for r in reports]}, indent=2) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["scenario", "id", "op", "kind", "provenance", "passed"])
        for r in reports:
            for e in r.results:
                w.writerow([r.name, e.id, e.op, e.kind, e.provenance, e.passed])
    else:
        for r in reports:
            out.write(r.to_text() + "\n")
        total = sum(len(r.results) for r in reports)
        out.write(f"{len(reports)} scenarios, {total} expectations, {'all pass' if ok else 'FAILURES'}\n")
    return OK if ok else NEGATIVE


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="commonfix", description="Exact common fixed point checks on the real line.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt="text"):
        sp.add_argument("--format", choices=("json", "text", "csv"), default=fmt)
        sp.add_argument("--resolution", type=int, default=64)
        sp.add_argument("--edge-offset", type=rational, default=None)

    v = sub.add_parser("verify", help="check hypotheses on a fixture")
    v.add_argument("fixture")
    v.add_argument("--theorem", choices=THEOREMS, default="three-map")
    v.add_argument("--condition", help=f"single condition variant: {', '.join(sorted(CONDITIONS))}")
    v.add_argument("--control")
    v.add_argument("--r", type=rational)
    v.add_argument("--maps", default="T,f")
    v.add_argument("--power", type=int, default=2)
    v.add_argument("--indices", type=lambda t: [int(i) for i in t.split(",")], default=list(range(1, 11)))
    common(v)
    v.set_defaults(func=cmd_verify)

    it = sub.add_parser("iterate", help="run the iteration and the fixed point pipeline")
    it.add_argument("fixture")
    it.add_argument("--x0", type=rational)
    it.add_argument("--power", type=int, default=1)
    it.add_argument("--psi")
    it.add_argument("--tol", type=rational)
    it.add_argument("--max-iter", type=int, default=iteration.DEFAULT_MAX_ITER)
    it.add_argument("--trace-csv")
    common(it, "json")
    it.set_defaults(func=cmd_iterate)

    sy = sub.add_parser("synthesize", help="build a monotone continuous psi above phi")
    sy.add_argument("source", help="fixture[.control], 'identity' or 'linear:p/q'")
    sy.add_argument("--control")
    sy.add_argument("--grid-hi", type=rational, default=scalar(3))
    sy.add_argument("--grid-n", type=int, default=1000)
    sy.add_argument("--out")
    sy.add_argument("--format", choices=("json", "text", "csv"), default="json")
    sy.set_defaults(func=cmd_synthesize)

    c = sub.add_parser("compat", help="compatibility and reciprocal continuity probes")
    c.add_argument("fixture")
    c.add_argument("--maps", default="T,f")
    c.add_argument("--witness")
    c.add_argument("--t", type=rational)
    c.add_argument("--format", choices=("json", "text", "csv"), default="json")
    c.set_defaults(func=cmd_compat)

    co = sub.add_parser("corpus", help="run the bundled example scenarios")
    co.add_argument("--only", action="append")
    co.add_argument("--format", choices=("json", "text", "csv"), default="text")
    co.set_defaults(func=cmd_corpus)
    return p


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return INPUT_ERROR
    except CommonFixError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
