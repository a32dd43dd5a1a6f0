import copy
import json
from fractions import Fraction as F

import pytest

from commonfix.corpus import (BUILTIN, FIXTURE_ENV, KNOWN_DISCREPANCY, fixture_dir, load_fixture, matches,
                              run_corpus, run_expectation, run_scenario)
from commonfix.domain import DomainSet
from commonfix.errors import FixtureInvalid, UnknownFixture


def _raw(name):
    return json.loads((fixture_dir() / f"{name}.json").read_text())


@pytest.mark.parametrize("name", BUILTIN)
def test_scenario_passes(name):
    rep = run_scenario(load_fixture(name))
    assert rep.ok, rep.to_text()
    assert rep.results


def test_known_discrepancies_are_recorded():
    reps = run_corpus()
    notes = [r for rep in reps for r in rep.results if r.kind == KNOWN_DISCREPANCY]
    assert notes and all(r.note for r in notes)


def _bump(form):
    key = "c" if form.get("kind") == "constant" else "b"
    form[key] = str(F(form.get(key, "0")) + F(1, 100))


def test_mutation_sensitivity(tmp_path):
    raw = _raw("ex3_3")
    for i in range(len(raw["maps"]["T"]["pieces"])):
        mutant = copy.deepcopy(raw)
        _bump(mutant["maps"]["T"]["pieces"][i]["form"])
        p = tmp_path / f"m{i}.json"
        p.write_text(json.dumps(mutant))
        try:
            s = load_fixture("ex3_3", p)
        except FixtureInvalid:
            continue  # the perturbation left X, which also counts as caught
        assert not run_scenario(s).ok, f"piece {i} mutant survived"


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        load_fixture("ex9_9")


def test_env_override(tmp_path, monkeypatch):
    raw = _raw("ex3_4")
    raw["name"] = "custom"
    (tmp_path / "custom.json").write_text(json.dumps(raw))
    monkeypatch.setenv(FIXTURE_ENV, str(tmp_path))
    assert load_fixture("custom").name == "custom"
    with pytest.raises(UnknownFixture):
        load_fixture("ex3_4")


def test_invalid_fixtures(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(FixtureInvalid):
        load_fixture("bad", p)
    raw = _raw("ex3_4")
    raw["maps"]["T"]["pieces"][0]["form"] = {"kind": "constant", "c": "0.5"}
    p.write_text(json.dumps(raw))
    with pytest.raises(FixtureInvalid):
        load_fixture("bad", p)
    raw = _raw("ex3_4")
    raw["maps"]["T"]["pieces"][0]["form"] = {"kind": "constant", "c": "3"}
    p.write_text(json.dumps(raw))
    with pytest.raises(FixtureInvalid, match="leaves the target"):
        load_fixture("bad", p)


def test_matches_semantics():
    assert matches(F(2, 3), "2/3") and not matches(F(2, 3), "3/4")
    assert matches(DomainSet.points([F(1, 2)]), [{"points": ["1/2"]}])
    assert matches({"status": "UniquePoint", "z": F(1)}, {"status": "UniquePoint"})
    assert not matches({"status": "UniquePoint"}, {"status": "UniquePoint", "z": "1"})
    assert matches(True, True) and not matches(True, False)


def test_report_serializes():
    rep = run_scenario(load_fixture("ex3_8"))
    out = json.loads(json.dumps(rep.to_json()))
    assert out["scenario"] == "ex3_8" and out["ok"] is True
    assert "scenario ex3_8: ok" in rep.to_text()


def test_error_outcomes_are_checkable(ex33):
    from commonfix.corpus import Expectation
    e = Expectation("x", "evaluate", {"map": "T", "x": "5"}, {"error": "OutOfDomain"})
    assert run_expectation(ex33, e).passed
