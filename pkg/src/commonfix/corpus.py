"""Executable scenarios for the worked examples, with expectation tables.

A fixture names its sets, maps, control functions and witness sequences,
then lists expectations: an operation, its arguments (by name), and the
expected result. Results are compared exactly; dict expectations only
constrain the keys they mention.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from . import compat, conditions, control, iteration, maps
from .domain import DomainSet, closure, is_complete, scalar, subset_of
from .errors import CommonFixError, FixtureInvalid, UnknownFixture
from .maps import MapFamily, PiecewiseMap, RootSet
from .serialize import (emit_map, jsonable, parse_condition, parse_control, parse_map, parse_set,
                        parse_witness)

FIXTURE_ENV = "COMMONFIX_FIXTURES"
BUILTIN = ("ex3_3", "ex3_4", "ex3_8", "ex4_2", "ex4_4", "ex4_7")

EXPECTED = "expected"
KNOWN_DISCREPANCY = "known_discrepancy"


@dataclass
class Expectation:
    id: str
    op: str
    args: Dict[str, Any]
    expected: Any
    provenance: str = "DERIVED"
    kind: str = EXPECTED
    note: str = ""


@dataclass
class Scenario:
    name: str
    space: DomainSet
    working: DomainSet
    sets: Dict[str, DomainSet]
    maps: Dict[str, Any]
    controls: Dict[str, control.ControlFunction]
    witnesses: Dict[str, Any]
    expectations: List[Expectation]
    _cache: Dict[str, PiecewiseMap] = field(default_factory=dict, repr=False)

    def map(self, ref: str) -> PiecewiseMap:
        """"T", "T^2" (iterate) or "T_3" (family member)."""
        if ref in self._cache:
            return self._cache[ref]
        m = re.fullmatch(r"(\w+?)(?:\^(\d+)|_(\d+))?", ref)
        if not m or m.group(1) not in self.maps:
            raise FixtureInvalid(f"unknown map {ref!r}")
        base = self.maps[m.group(1)]
        if m.group(3):
            if not isinstance(base, MapFamily):
                raise FixtureInvalid(f"{m.group(1)} is not a family")
            out = base(int(m.group(3)))
        else:
            if isinstance(base, MapFamily):
                base = base(1)
            out = maps.iterate_map(base, int(m.group(2))) if m.group(2) else base
        self._cache[ref] = out
        return out

    def family(self, ref: str) -> MapFamily:
        fam = self.maps.get(ref)
        if not isinstance(fam, MapFamily):
            raise FixtureInvalid(f"{ref!r} is not a family")
        return fam

    def set(self, ref) -> DomainSet:
        """Named set, "M(S)" image, "closure(S)" or "A & B"."""
        if not isinstance(ref, str):
            return parse_set(ref)
        ref = ref.strip()
        if "&" in ref:
            parts = [self.set(p) for p in ref.split("&")]
            out = parts[0]
            for p in parts[1:]:
                out = out.intersect(p)
            return out
        if ref in self.sets:
            return self.sets[ref]
        m = re.fullmatch(r"closure\((.+)\)", ref)
        if m:
            return closure(self.set(m.group(1)))
        m = re.fullmatch(r"([\w^]+)\((.+)\)", ref)
        if m:
            return self.map(m.group(1)).image(self.set(m.group(2)))
        raise FixtureInvalid(f"unknown set {ref!r}")

    def control(self, ref) -> control.ControlFunction:
        if isinstance(ref, dict):
            return parse_control(ref)
        if ref not in self.controls:
            raise FixtureInvalid(f"unknown control {ref!r}")
        return self.controls[ref]

    def condition(self, obj) -> conditions.Condition:
        return parse_condition(obj, self.controls)


def fixture_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("commonfix") / "fixtures"))


def _build(raw: Dict) -> Scenario:
    sets = {k: parse_set(v) for k, v in raw.get("sets", {}).items()}
    space = sets[raw.get("space", "X")]
    working = sets[raw.get("working", "K")]
    ctrls = {k: parse_control(v, name=k) for k, v in raw.get("controls", {}).items()}
    mps = {k: parse_map(v, sets, name=k) for k, v in raw.get("maps", {}).items()}
    for k, m in mps.items():
        fam_head = m(1) if isinstance(m, MapFamily) else m
        ok, w = subset_of(fam_head.domain, working)
        if not ok:
            raise FixtureInvalid(f"map {k} is defined outside K at {w}")
        ok, w = subset_of(fam_head.codomain, space)
        if not ok:
            raise FixtureInvalid(f"map {k} lands outside X at {w}")
    wits = {k: parse_witness(v) for k, v in raw.get("witnesses", {}).items()}
    exps = [Expectation(e["id"], e["op"], e.get("args", {}), e.get("expected"), e.get("provenance", "DERIVED"),
                        e.get("kind", EXPECTED), e.get("note", "")) for e in raw.get("expectations", [])]
    return Scenario(raw["name"], space, working, sets, mps, ctrls, wits, exps)


def load_fixture(name: str, path: Optional[Path] = None) -> Scenario:
    """Load a builtin scenario by name, or any fixture file by path."""
    if path is None:
        path = fixture_dir() / f"{name}.json"
        if not path.exists():
            raise UnknownFixture(name)
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FixtureInvalid(f"{path}: {exc}") from exc
    try:
        return _build(raw)
    except FixtureInvalid:
        raise
    except (CommonFixError, KeyError, TypeError, ValueError) as exc:
        raise FixtureInvalid(f"{path}: {type(exc).__name__}: {exc}") from exc


# --------------------------------------------------------------- operations

def _maps(s: Scenario, a: Dict) -> List[PiecewiseMap]:
    return [s.map(r) for r in a["maps"]]


def _samples(s: Scenario, a: Dict, ms: List[PiecewiseMap]):
    res = int(a.get("resolution", 64))
    return maps.sample_for_maps(ms[0].domain, ms, res, None)


def _grid(a: Dict) -> List[Fraction]:
    g = a.get("grid", {"hi": "3", "n": 1000})
    hi, n = scalar(g["hi"]), int(g["n"])
    return [hi * i / n for i in range(1, n + 1)]


def _config(s: Scenario, a: Dict) -> iteration.PipelineConfig:
    cfg = iteration.PipelineConfig()
    if "x0" in a:
        cfg.x0 = scalar(a["x0"])
    if "psi" in a:
        cfg.psi = s.control(a["psi"])
    if "resolution" in a:
        cfg.resolution = int(a["resolution"])
    if "max_iter" in a:
        cfg.max_iter = int(a["max_iter"])
    return cfg


def _three(ms):
    return ms[0], ms[1], (ms[2] if len(ms) > 2 else None)


def _op_check(s, a):
    ms = _maps(s, a)
    cond = s.condition(a["condition"])
    fam = s.family(a["family"]) if "family" in a else None
    if fam is not None:
        ms = [fam(1)] + ms
    T, f, g = _three(ms)
    return conditions.check_condition(cond, T, f, g, _samples(s, a, ms), family=fam, indices=a.get("indices"))


def _op_worst(s, a):
    ms = _maps(s, a)
    T, f, g = _three(ms)
    return conditions.worst_ratio(s.condition(a["condition"]), T, f, g, _samples(s, a, ms))


def _op_symmetry(s, a):
    ms = _maps(s, a)
    T, f, g = _three(ms)
    return conditions.symmetry_audit(s.condition(a["condition"]), T, f, g, _samples(s, a, ms))


def _op_rhs(s, a):
    T, f, g = _three(_maps(s, a))
    return conditions.rhs_bound(s.condition(a["condition"]), scalar(a["x"]), scalar(a["y"]), T, f, g)


def _op_cfp(s, a):
    T, f, g = _three(_maps(s, a))
    return iteration.common_fixed_point(T, f, g, _config(s, a))


def _op_descent(s, a):
    T, f, g = _three(_maps(s, a))
    trace = iteration.run_jungck(T, f, g, scalar(a["x0"]))
    return iteration.verify_alpha_descent(trace, s.control(a["psi"]))


def _op_limits(s, a):
    T, f = _maps(s, a)
    return compat.sequence_limits(T, f, s.witnesses[a["witness"]])


def _op_commutes(s, a):
    T, f = _maps(s, a)
    S = (compat.fixed_set_intersection([s.map(r) for r in a["fixed_set_of"]]) if "fixed_set_of" in a
         else s.set(a["set"]))
    return compat.commutes_on_set(T, f, S)


def _op_regularity(s, a):
    return control.check_regularity(s.control(a["control"]), _grid(a))


def _op_synth(s, a):
    psi, cert = control.synthesize_psi(s.control(a["control"]), _grid(a))
    return cert


def _op_complete(s, a):
    ok, w = is_complete(s.set(a["set"]))
    return {"complete": ok, "witness": w}


def _op_subset(s, a):
    ok, w = subset_of(s.set(a["a"]), s.set(a["b"]))
    return {"holds": ok, "witness": w}


def _op_coincidence(s, a):
    m1, m2 = _maps(s, a)
    within = s.set(a["within"]) if "within" in a else None
    return maps.coincidence_points(m1, m2, within)


OPS: Dict[str, Callable[[Scenario, Dict], Any]] = {
    "evaluate": lambda s, a: s.map(a["map"])(scalar(a["x"])),
    "image": lambda s, a: s.map(a["map"]).image(s.set(a["of"]) if "of" in a else None),
    "set": lambda s, a: s.set(a["set"]),
    "closure": lambda s, a: closure(s.set(a["set"])),
    "is_complete": _op_complete,
    "subset_of": _op_subset,
    "compose": lambda s, a: maps.compose(s.map(a["outer"]), s.map(a["inner"])),
    "iterate_map": lambda s, a: maps.iterate_map(s.map(a["map"]), int(a["power"])),
    "fixed_points": lambda s, a: maps.fixed_points(s.map(a["map"])),
    "coincidence_points": _op_coincidence,
    "fixed_set_intersection": lambda s, a: compat.fixed_set_intersection(_maps(s, a)),
    "check_condition": _op_check,
    "worst_ratio": _op_worst,
    "symmetry_audit": _op_symmetry,
    "rhs_bound": _op_rhs,
    "check_regularity": _op_regularity,
    "synthesize_psi": _op_synth,
    "control_value": lambda s, a: s.control(a["control"])(scalar(a["t"])),
    "sequence_limits": _op_limits,
    "is_compatible_on": lambda s, a: compat.is_compatible_on(*_maps(s, a), s.witnesses[a["witness"]]),
    "is_reciprocal_continuous_on": lambda s, a: compat.is_reciprocal_continuous_on(
        *_maps(s, a), s.witnesses[a["witness"]], a.get("t")),
    "is_weakly_compatible": lambda s, a: compat.is_weakly_compatible(*_maps(s, a)),
    "commutes_on_set": _op_commutes,
    "run_jungck": lambda s, a: iteration.run_jungck(*_three(_maps(s, a)), scalar(a["x0"])),
    "verify_alpha_descent": _op_descent,
    "common_fixed_point": _op_cfp,
    "iterated_common_fixed_point": lambda s, a: iteration.iterated_common_fixed_point(
        *_maps(s, a), int(a["m"]), _config(s, a)),
    "family_common_fixed_point": lambda s, a: iteration.family_common_fixed_point(
        s.family(a["family"]), s.map(a["f"]), [int(j) for j in a["indices"]], _config(s, a)),
}


# --------------------------------------------------------------- comparison

def _field(obj, key):
    if isinstance(obj, dict):
        return obj[key]
    if isinstance(obj, (list, tuple)) and key.isdigit():
        return obj[int(key)]
    return getattr(obj, key)


def matches(computed: Any, expected: Any) -> bool:
    """Exact comparison; dicts in `expected` constrain only their keys."""
    if isinstance(computed, (DomainSet, RootSet)):
        target = parse_set(expected) if not isinstance(expected, str) else None
        return computed == target if target is not None else str(computed) == expected
    if isinstance(computed, PiecewiseMap) and isinstance(expected, list):
        mine = emit_map(computed)["pieces"]
        other = emit_map(PiecewiseMap(computed.domain, [maps.MapPiece(*_piece(p)) for p in expected],
                                      computed.codomain))["pieces"]
        return mine == other
    if isinstance(expected, dict):
        try:
            return all(matches(_field(computed, k), v) for k, v in expected.items())
        except (KeyError, AttributeError, IndexError, TypeError):
            return False
    if isinstance(expected, list):
        try:
            items = list(computed)
        except TypeError:
            return False
        return len(items) == len(expected) and all(matches(c, e) for c, e in zip(items, expected))
    if isinstance(computed, Fraction) and isinstance(expected, (str, int)) and not isinstance(expected, bool):
        try:
            return computed == scalar(expected)
        except ValueError:
            return False
    if callable(getattr(computed, "__bool__", None)) and isinstance(expected, bool) and not isinstance(computed, bool):
        return bool(computed) == expected
    return jsonable(computed) == expected


def _piece(p):
    from .serialize import parse_form, parse_interval
    return parse_interval(p["guard"]), parse_form(p["form"])


# ------------------------------------------------------------------ reports

@dataclass
class ExpectationResult:
    id: str
    op: str
    passed: bool
    kind: str
    provenance: str
    expected: Any
    computed: Any
    error: Optional[str] = None
    note: str = ""


@dataclass
class ScenarioReport:
    name: str
    results: List[ExpectationResult]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results if r.kind == EXPECTED)

    @property
    def failures(self) -> List[ExpectationResult]:
        return [r for r in self.results if not r.passed and r.kind == EXPECTED]

    def to_json(self) -> Dict:
        return {"scenario": self.name, "ok": self.ok, "results": [jsonable(r) for r in self.results]}

    def to_text(self) -> str:
        lines = [f"scenario {self.name}: {'ok' if self.ok else 'FAILED'}"]
        for r in self.results:
            mark = "pass" if r.passed else ("note" if r.kind == KNOWN_DISCREPANCY else "FAIL")
            line = f"  [{mark}] {r.id} ({r.op})"
            if not r.passed:
                line += f" expected {json.dumps(r.expected)} got {json.dumps(r.computed)}"
            if r.error:
                line += f" error {r.error}"
            lines.append(line)
        return "\n".join(lines)


MAX_LIST = 12


def _trim(obj: Any) -> Any:
    if isinstance(obj, list):
        head = [_trim(v) for v in obj[:MAX_LIST]]
        return head + ([f"... {len(obj) - MAX_LIST} more"] if len(obj) > MAX_LIST else [])
    if isinstance(obj, dict):
        return {k: _trim(v) for k, v in obj.items()}
    return obj


def _summary(value: Any) -> Any:
    out = jsonable(value)
    if isinstance(out, dict) and "trace" in out:
        out = dict(out, trace="...")
    return _trim(out)


def run_expectation(s: Scenario, e: Expectation) -> ExpectationResult:
    if e.op not in OPS:
        return ExpectationResult(e.id, e.op, False, e.kind, e.provenance, e.expected, None, f"unknown op {e.op}")
    try:
        value = OPS[e.op](s, e.args)
    except CommonFixError as exc:
        # a raised domain error is itself a checkable outcome
        value = {"error": type(exc).__name__}
    computed = _summary(value)
    if isinstance(value, dict) and "error" in value:
        passed = isinstance(e.expected, dict) and e.expected.get("error") == value["error"]
        return ExpectationResult(e.id, e.op, passed, e.kind, e.provenance, e.expected, computed, value["error"], e.note)
    return ExpectationResult(e.id, e.op, matches(value, e.expected), e.kind, e.provenance, e.expected,
                             computed, None, e.note)


def run_scenario(s: Scenario) -> ScenarioReport:
    return ScenarioReport(s.name, [run_expectation(s, e) for e in s.expectations])


def run_corpus(names=BUILTIN) -> List[ScenarioReport]:
    return [run_scenario(load_fixture(n)) for n in names]
