"""JSON encoding of sets, maps, controls, conditions and witnesses.

Scalars travel as rational strings ("p/q"); decimals are rejected on input.
"""
from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Any, Callable, Dict, Optional

from . import conditions as C
from .compat import ExplicitList, MobiusInInverseN
from .control import CFPiece, ControlFunction, LinearTable, from_table, linear
from .domain import DomainSet, GeometricSeq, Interval, PointSet, fmt, scalar
from .errors import FixtureInvalid
from .maps import Constant, MapFamily, MapPiece, Mobius, PiecewiseMap, RootSet, make_form
from .roots import QuadraticRoot


def _s(x) -> Optional[str]:
    return fmt(x) if x is not None else None


# ------------------------------------------------------------------- sets

def parse_interval(obj: Dict) -> Interval:
    lo, hi = obj.get("lo"), obj.get("hi")
    return Interval(None if lo is None else scalar(lo), None if hi is None else scalar(hi),
                    bool(obj.get("lo_closed", True)), bool(obj.get("hi_closed", True)))


def emit_interval(iv: Interval) -> Dict:
    return {"lo": _s(iv.lo), "hi": _s(iv.hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}


def _parse_component(obj: Dict):
    if "points" in obj:
        return PointSet(tuple(scalar(p) for p in obj["points"]))
    if obj.get("kind") == "geometric":
        return GeometricSeq(scalar(obj["base"]), scalar(obj["ratio"]), bool(obj.get("includes_limit", False)),
                            scalar(obj.get("limit", "0")))
    return parse_interval(obj)


def parse_set(obj) -> DomainSet:
    if isinstance(obj, dict):
        obj = [obj]
    return DomainSet(_parse_component(c) for c in obj)


def emit_set(S: DomainSet):
    out = []
    for c in S.components:
        if isinstance(c, Interval):
            out.append(emit_interval(c))
        elif isinstance(c, PointSet):
            out.append({"points": [fmt(p) for p in c.points]})
        else:
            out.append({"kind": "geometric", "base": fmt(c.base), "ratio": fmt(c.ratio),
                        "includes_limit": c.includes_limit, "limit": fmt(c.limit)})
    return out


# ------------------------------------------------------------------ forms

def _coef(v, n: Optional[int]) -> Fraction:
    """A plain rational, or {"inv_n": [a, b, c, d]} meaning (a/n + b)/(c/n + d)."""
    if isinstance(v, dict) and "inv_n" in v:
        if n is None:
            raise FixtureInvalid("index-dependent coefficient outside a family")
        a, b, c, d = (scalar(t) for t in v["inv_n"])
        u = Fraction(1, n)
        return (a * u + b) / (c * u + d)
    return scalar(v)


def parse_form(obj: Dict, n: Optional[int] = None):
    kind = obj.get("kind", "mobius")
    if kind == "constant":
        return Constant(_coef(obj["c"], n))
    if kind == "mobius":
        return make_form(*(_coef(obj.get(k, dflt), n) for k, dflt in
                           (("a", "1"), ("b", "0"), ("c", "0"), ("d", "1"))))
    if kind == "linear_table":
        return LinearTable(tuple((scalar(t), scalar(v)) for t, v in obj["knots"]))
    raise FixtureInvalid(f"unknown form kind {kind!r}")


def emit_form(form) -> Dict:
    if isinstance(form, Constant):
        return {"kind": "constant", "c": fmt(form.c)}
    if isinstance(form, LinearTable):
        return {"kind": "linear_table", "knots": [[fmt(t), fmt(v)] for t, v in form.knots]}
    a, b, c, d = form.matrix
    return {"kind": "mobius", "a": fmt(a), "b": fmt(b), "c": fmt(c), "d": fmt(d)}


# ------------------------------------------------------------------- maps

def _pieces(obj, n=None):
    return [MapPiece(parse_interval(p["guard"]), parse_form(p["form"], n)) for p in obj["pieces"]]


def parse_map(obj: Dict, sets: Dict[str, DomainSet], name: str = "m"):
    """A PiecewiseMap, or a MapFamily when "index_symbol" is present."""
    dom = resolve_set(obj["domain"], sets)
    cod = resolve_set(obj["codomain"], sets) if "codomain" in obj else None
    if "index_symbol" in obj:
        return MapFamily(lambda n: PiecewiseMap(dom, _pieces(obj, n), cod, f"{name}_{n}"), name)
    return PiecewiseMap(dom, _pieces(obj), cod, name)


def emit_map(m: PiecewiseMap) -> Dict:
    out = {"domain": emit_set(m.domain),
           "pieces": [{"guard": emit_interval(p.guard), "form": emit_form(p.form)} for p in m.pieces]}
    if m.codomain != m.domain:
        out["codomain"] = emit_set(m.codomain)
    return out


def resolve_set(ref, sets: Dict[str, DomainSet]) -> DomainSet:
    if isinstance(ref, str):
        if ref not in sets:
            raise FixtureInvalid(f"unknown set {ref!r}")
        return sets[ref]
    return parse_set(ref)


# --------------------------------------------------------------- controls

_FLAGS = ("monotone_increasing", "continuous", "upper_semicontinuous")


def parse_control(obj: Dict, name: str = "phi") -> ControlFunction:
    kind = obj.get("kind", "piecewise")
    if kind == "linear":
        return linear(scalar(obj["r"]), name=name)
    if kind == "linear_table":
        return from_table([(scalar(t), scalar(v)) for t, v in obj["knots"]], scalar(obj.get("tail_slope", "0")),
                          name=name)
    if kind != "piecewise":
        raise FixtureInvalid(f"unknown control kind {kind!r}")
    pieces = tuple(CFPiece(parse_interval(p["guard"]), parse_form(p["form"])) for p in obj["pieces"])
    return ControlFunction(pieces, name=name, **{k: bool(obj.get(k, False)) for k in _FLAGS})


def emit_control(cf: ControlFunction) -> Dict:
    out = {"kind": "piecewise", "name": cf.name,
           "pieces": [{"guard": emit_interval(p.guard), "form": emit_form(p.form)} for p in cf.pieces]}
    out.update(cf.declared_flags)
    return out


# ------------------------------------------------------------- conditions

CONDITIONS = {cls.label: cls for cls in (
    C.Jungck, C.Singh, C.BabuMax, C.Som, C.BabuTriple, C.BoydWong, C.SongGen, C.MinBoydWong,
    C.MinSong, C.Main, C.TwoMapMax, C.IteratedTwoMap, C.FamilyTwoMap)}


def parse_condition(obj: Dict, controls: Dict[str, ControlFunction]) -> C.Condition:
    variant = obj.get("variant")
    if variant not in CONDITIONS:
        raise FixtureInvalid(f"unknown condition variant {variant!r}")
    cls = CONDITIONS[variant]
    kwargs = {}
    for fld in dataclasses.fields(cls):
        if fld.name not in obj:
            continue
        v = obj[fld.name]
        if fld.name == "control":
            kwargs[fld.name] = controls[v] if isinstance(v, str) else parse_control(v)
        elif fld.name in ("m", "j"):
            kwargs[fld.name] = int(v)
        elif fld.name == "pair_indices":
            kwargs[fld.name] = tuple(int(i) for i in v)
        else:
            kwargs[fld.name] = scalar(v)
    return cls(**kwargs)


# -------------------------------------------------------------- witnesses

def parse_witness(obj: Dict):
    kind = obj.get("kind")
    if kind == "mobius_in_inv_n":
        return MobiusInInverseN(scalar(obj.get("a", "0")), scalar(obj.get("b", "0")), scalar(obj.get("c", "0")),
                                scalar(obj.get("d", "1")), int(obj.get("start_index", 1)))
    if kind == "explicit":
        return ExplicitList(tuple(scalar(p) for p in obj["points"]), int(obj.get("start_index", 1)))
    raise FixtureInvalid(f"unknown witness kind {kind!r}")


# ---------------------------------------------------------------- generic

def jsonable(value: Any) -> Any:
    """Plain JSON data with every rational as a lowest-terms string."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, (DomainSet, RootSet, QuadraticRoot, Interval)):
        return str(value)
    if isinstance(value, PiecewiseMap):
        return emit_map(value)
    if isinstance(value, ControlFunction):
        return emit_control(value)
    if isinstance(value, (Constant, Mobius, LinearTable)):
        return str(value)
    if isinstance(value, C.Condition):
        return value.label
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)
                if not f.name.startswith("_")}
    if isinstance(value, dict):
        return {str(jsonable(k)): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in value]
    if isinstance(value, Callable):
        return getattr(value, "__name__", "callable")
    return str(value)
