import json
from pathlib import Path

import pytest

from dpglue import checks
from dpglue.cli import main
from dpglue.counterexample import build_g0, build_g0_cover
from dpglue.cover import Cover
from dpglue.graph import build_complete, build_cycle

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture
def files(tmp_path):
    g0, _ = build_g0()
    paths = {
        "g0": tmp_path / "g0.json",
        "c4": tmp_path / "c4.json",
        "c5": tmp_path / "c5.json",
        "k4": tmp_path / "k4.json",
        "cover": tmp_path / "cover.json",
        "bad": tmp_path / "bad.json",
    }
    paths["g0"].write_text(g0.dumps())
    paths["c4"].write_text(build_cycle(4).dumps())
    paths["c5"].write_text(build_cycle(5).dumps())
    paths["k4"].write_text(build_complete(4).dumps())
    paths["cover"].write_text(build_g0_cover().dumps())
    bad = build_g0_cover().to_json()
    bad["matchings"][0]["map"] = [1, 1, 2, 3]
    paths["bad"].write_text(json.dumps(bad))
    return {k: str(v) for k, v in paths.items()}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_chromatic(capsys, files):
    code, out, _ = run(capsys, "chromatic", files["g0"], "--m", "4")
    assert code == 0 and "120" in out
    code, out, _ = run(capsys, "chromatic", files["c5"], "--m", "3", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == "30"


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "chromatic", str(tmp_path / "nope.json"), "--m", "3")
    assert code == 2 and "no such file" in err


def test_malformed_json(capsys, tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    code, _, err = run(capsys, "chromatic", str(p), "--m", "3")
    assert code == 2 and err


def test_count(capsys, files):
    code, out, _ = run(capsys, "count", files["g0"], files["cover"], "--format", "json")
    assert code == 0 and json.loads(out)["count"] == "104"
    code, out, _ = run(capsys, "count", files["g0"], files["cover"], "--prescribe", "w:1", "--format", "json")
    assert json.loads(out)["count"] == "26"
    code, out, _ = run(capsys, "count", files["g0"], files["cover"], "--prescribe", "w:1,w:2", "--format", "json")
    assert json.loads(out)["count"] == "0"


def test_count_rejects_invalid_cover(capsys, files):
    code, _, err = run(capsys, "count", files["g0"], files["bad"])
    assert code == 2 and "axiom (4)" in err


def test_count_rejects_mismatched_graph(capsys, files):
    code, _, err = run(capsys, "count", files["c4"], files["cover"])
    assert code == 2


def test_dpmin(capsys, files, tmp_path):
    out_file = tmp_path / "argmin.json"
    code, out, _ = run(capsys, "dpmin", files["c4"], "--m", "3", "--format", "json", "--argmin-out", str(out_file))
    assert code == 0 and json.loads(out)["value"] == "15"
    c = Cover.from_json(json.loads(out_file.read_text()))
    assert c.host == build_cycle(4)


def test_dpmin_clique(capsys, files):
    code, out, _ = run(capsys, "dpmin", files["k4"], "--m", "4", "--clique", "v1,v2,v3", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == "24"


def test_dpmin_budget_exit_code(capsys, files):
    code, out, err = run(capsys, "dpmin", files["k4"], "--m", "4", "--budget", "2000", "--format", "json")
    assert code == 3
    payload = json.loads(out)
    assert payload["exact"] is False and int(payload["upper_bound"]) >= 24
    assert "resource limit" in err


def test_dpmin_is_deterministic_across_shards(capsys, files):
    outs = []
    for shards in ("1", "4", "1"):
        code, out, _ = run(capsys, "dpmin", files["k4"], "--m", "4", "--shards", shards, "--format", "json")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]


def test_bad_arguments(capsys, files):
    assert run(capsys, "verify", "bogus")[0] == 2
    assert run(capsys, "dpmin", files["c4"], "--m", "0")[0] == 2
    assert run(capsys, "dpmin", files["c4"], "--m", "3", "--clique", "v1,zz")[0] == 2
    assert run(capsys)[0] == 2


def test_verify_lemma31(capsys):
    code, out, _ = run(capsys, "verify", "lemma31")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4 and all(l.startswith("PASS") for l in lines)


def test_verify_prop28_json(capsys):
    code, out, _ = run(capsys, "verify", "prop28", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["passed"] and len(data["checks"]) == 10


def test_verify_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setitem(checks.SUITES, "lemma31",
                        lambda **kw: [checks.CheckResult("forced", False, "detail")])
    code, out, _ = run(capsys, "verify", "lemma31")
    assert code == 4 and out.startswith("FAIL")


def test_bundled_data_files():
    g0, _ = build_g0()
    assert json.loads((DATA / "g0.json").read_text()) == g0.to_json()
    assert Cover.from_json(json.loads((DATA / "g0_cover.json").read_text())) == build_g0_cover()
