import csv
import io
import json
import subprocess
import sys

import pytest

from commonfix.cli import INPUT_ERROR, NEGATIVE, OK, main


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_verify_three_map_ok():
    code, text = run("verify", "ex3_3")
    assert code == OK and "ok: true" in text


def test_verify_condition_negative_with_witness():
    code, text = run("verify", "ex4_2", "--condition", "two_map_max", "--control", "phi", "--format", "json")
    assert code == NEGATIVE
    out = json.loads(text)
    assert out["ok"] is False
    fail = out["first_failure"]
    assert fail["check"] == "condition" and fail["witness"] == ["1011/4000", "1/3"]


def test_verify_iterated_commute_failure():
    code, _ = run("verify", "ex4_4", "--theorem", "iterated", "--power", "2")
    assert code == NEGATIVE


def test_iterate_json_and_trace(tmp_path):
    p = tmp_path / "trace.csv"
    code, text = run("iterate", "ex3_8", "--x0", "1", "--trace-csv", str(p))
    assert code == NEGATIVE
    out = json.loads(text)
    assert out["status"] == "NoLimitInSpace" and out["escaping_to"] == "0"
    rows = list(csv.reader(p.open()))
    assert rows[0][:3] == ["n", "x_n", "y_n"] and rows[1][1] == "1"


def test_iterate_power():
    code, text = run("iterate", "ex4_2", "--power", "2")
    assert code == OK and json.loads(text)["z"] == "1"


def test_synthesize(tmp_path):
    out = tmp_path / "psi.json"
    code, text = run("synthesize", "ex3_3.phi", "--grid-n", "200", "--out", str(out))
    assert code == OK and json.loads(text)["ok"] is True
    assert json.loads(out.read_text())["kind"] == "piecewise"
    code, _ = run("synthesize", "identity")
    assert code == NEGATIVE


def test_compat():
    code, text = run("compat", "ex3_4", "--witness", "w")
    out = json.loads(text)
    assert out["witness[w]"]["limits"] == ["2/3", "2/3", "1/2", "5/6"]


def test_corpus_text_and_csv():
    code, text = run("corpus", "--only", "ex3_4")
    assert code == OK and "all pass" in text
    code, text = run("corpus", "--only", "ex3_8", "--format", "csv")
    assert code == OK and text.splitlines()[0].startswith("scenario,id,op")


@pytest.mark.parametrize("argv", [
    ("verify", "ex9_9"),
    ("iterate", "ex3_3", "--x0", "0.5"),
    ("verify", "ex3_3", "--condition", "nope"),
])
def test_input_errors(argv):
    assert run(*argv)[0] == INPUT_ERROR


def test_malformed_fixture(tmp_path, monkeypatch):
    (tmp_path / "broken.json").write_text("{")
    monkeypatch.setenv("COMMONFIX_FIXTURES", str(tmp_path))
    assert run("verify", "broken")[0] == INPUT_ERROR


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "commonfix", "iterate", "ex3_3"], capture_output=True, text=True)
    assert proc.returncode == 0 and '"z": "2/3"' in proc.stdout


def test_min_song_reading_is_reported():
    code, text = run("verify", "ex3_3", "--condition", "min_song", "--r", "1/2", "--maps", "T,f,g")
    assert text.startswith("note: min_song")
