import json

import pytest

from spreadlab.cli import main
from spreadlab.closure import PointSet
from spreadlab.galois import tower_for
from spreadlab.intersect import spread_intersection
from spreadlab.moore import Spread, build_spread, moore_space
from spreadlab.report import FAIL, SKIPPED, VerificationReport
from spreadlab.suites import SUITES


def run(argv):
    return main([str(a) for a in argv])


def load(path):
    return json.loads(path.read_text())


def write(path, data):
    path.write_text(json.dumps(data))
    return path


# --- field -------------------------------------------------------------------

def test_field_info(tmp_path):
    out = tmp_path / "f.json"
    assert run(["field", "info", "--p", 3, "--e", 1, "--h", 4, "--out", out]) == 0
    data = load(out)
    assert data["polys"][1] == [2, 1, 0, 0, 1]
    assert run(["field", "info", "--q", 9, "--h", 2, "--element", 5, "--out", out]) == 0
    T = tower_for(9, 2)
    assert load(out)["element"]["min_subfield_degree"] == T.min_subfield_degree(5)


def test_field_info_errors():
    assert run(["field", "info", "--p", 4, "--h", 2]) == 2
    assert run(["field", "info", "--h", 2]) == 2
    assert run(["field", "info", "--q", 6]) == 2
    assert run(["field", "info", "--q", 3, "--element", 99]) == 2


# --- spreads -------------------------------------------------------------------

@pytest.mark.parametrize("model", ["moore", "singer"])
def test_spread_build_and_check(tmp_path, model):
    out = tmp_path / "s.json"
    assert run(["spread", "build", "--q", 3, "--k", 2, "--h", 2, "--model", model, "--out", out]) == 0
    S = Spread.from_json(load(out))
    assert len(S) == 10 and S.provenance == model
    rep = tmp_path / "r.json"
    assert run(["spread", "check", "--input", out, "--out", rep]) == 0
    assert load(rep)["status"] == "PASS"


def test_spread_build_from_director_file(tmp_path):
    Theta = moore_space(3, 2, 2).director(1)
    f = write(tmp_path / "theta.json", Theta.to_json())
    out = tmp_path / "s.json"
    assert run(["spread", "build", "--q", 3, "--k", 2, "--h", 2, "--model", "director",
                "--director-file", f, "--out", out]) == 0
    assert Spread.from_json(load(out)).elements == build_spread(3, 2, 2).elements


def test_broken_spread_fails_check(tmp_path):
    data = build_spread(3, 2, 2).to_json()
    data["elements"] = data["elements"][1:]
    f = write(tmp_path / "bad.json", data)
    out = tmp_path / "r.json"
    assert run(["spread", "check", "--input", f, "--out", out]) == 1
    rep = load(out)
    assert rep["status"] == FAIL
    assert rep["assertions"][0]["witness"]["elements"] == 9


def test_malformed_json_reports_location(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text('{"q": 3,\n "k": }')
    assert run(["spread", "check", "--input", f]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_missing_input_file(tmp_path):
    assert run(["spread", "check", "--input", tmp_path / "nope.json"]) == 2


def test_usage_errors():
    assert run([]) == 2
    assert run(["bogus"]) == 2
    assert run(["spread", "check"]) == 2
    assert run(["spread", "build", "--q", 3]) == 2
    assert run(["verify", "--suite", "segre", "--q", 3, "--k", 2]) == 2


# --- segre ---------------------------------------------------------------------

def test_segre_build_generalized(tmp_path):
    out = tmp_path / "g.json"
    assert run(["segre", "build", "--q", 2, "--k", 2, "--h", 4, "--r", 2, "--out", out]) == 0
    data = load(out)
    assert len(data["points"]) == 75
    assert len(data["systemA"]) == len(data["systemB"]) == 5
    assert data["type"] == "segre" and data["r"] == 2


def test_segre_build_classical(tmp_path):
    out = tmp_path / "s.json"
    assert run(["segre", "build", "--q", 3, "--k", 2, "--h", 2, "--out", out]) == 0
    assert len(load(out)["points"]) == 16


# --- closure -------------------------------------------------------------------

def frame_file(tmp_path, q, k, h, extra=()):
    pts = [[int(i == j) for j in range(k)] for i in range(k)] + [[1] * k] + [list(P) for P in extra]
    return write(tmp_path / "pts.json", {"ambient": {"k": k, "q": q, "h": h}, "points": pts})


def test_closure_generate_then_classify(tmp_path):
    f = frame_file(tmp_path, 3, 3, 2)
    out = tmp_path / "closed.json"
    assert run(["closure", "generate", "--input", f, "--out", out]) == 0
    assert len(load(out)["points"]) == 13
    cls = tmp_path / "cls.json"
    assert run(["closure", "classify", "--input", out, "--out", cls]) == 0
    data = load(cls)
    assert data["closed"] and data["r"] == 1
    assert data["line_spectrum"] == {"4": 13}


def test_closure_classify_not_closed(tmp_path):
    f = frame_file(tmp_path, 3, 3, 2, extra=[(1, 1, 0), (1, 2, 0), (1, 4, 0)])
    out = tmp_path / "cls.json"
    assert run(["closure", "classify", "--input", f, "--out", out]) == 1
    assert not load(out)["closed"]


def test_closure_classify_refused_at_q2(tmp_path, capsys):
    f = frame_file(tmp_path, 2, 3, 2)
    assert run(["closure", "classify", "--input", f]) == 2
    assert "q > 2" in capsys.readouterr().err


def test_closure_input_validation(tmp_path):
    f = write(tmp_path / "p.json", {"ambient": {"k": 2, "q": 3}, "points": []})
    assert run(["closure", "generate", "--input", f]) == 2
    f = write(tmp_path / "p.json", {"ambient": {"k": 2, "q": 3, "h": 2}, "points": [[1, "x"]]})
    assert run(["closure", "generate", "--input", f]) == 2


# --- arcs and intersections ----------------------------------------------------

def test_arc_canonical_and_check(tmp_path):
    out = tmp_path / "arc.json"
    assert run(["arc", "canonical", "--q", 3, "--k", 2, "--h", 2, "--out", out]) == 0
    rep = tmp_path / "rep.json"
    assert run(["arc", "check", "--input", out, "--out", rep]) == 0
    data = load(out)
    data["elements"][2] = data["elements"][0]
    bad = write(tmp_path / "bad.json", {"arcs": [load(out), data]})
    assert run(["arc", "check", "--input", bad, "--out", rep]) == 1
    statuses = [a["status"] for a in load(rep)["assertions"]]
    assert statuses == ["PASS", "FAIL"]


def test_intersect_spreads_and_trace(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(["spread", "build", "--q", 3, "--k", 2, "--h", 2, "--out", a]) == 0
    assert run(["spread", "build", "--q", 3, "--k", 2, "--h", 2, "--model", "singer", "--out", b]) == 0
    out = tmp_path / "i.json"
    assert run(["intersect", "spreads", "--a", a, "--b", a, "--out", out]) == 0
    assert load(out)["size"] == 10
    assert run(["intersect", "spreads", "--a", a, "--b", b, "--out", out]) == 0
    common = spread_intersection(Spread.from_json(load(a)), Spread.from_json(load(b)))
    assert load(out)["size"] == len(common)
    F = moore_space(3, 2, 4).top
    assert run(["intersect", "trace", "--q", 3, "--k", 2, "--h", 4, "--v", f"1,{F.primitive}",
                "--out", out]) == 0
    data = load(out)
    assert data["kind"] == "points" and data["index"] == 4
    assert run(["intersect", "trace", "--q", 3, "--k", 2, "--h", 4, "--v", "1,2,3"]) == 2
    assert run(["intersect", "trace", "--q", 3, "--k", 2, "--h", 4, "--v", "a,b"]) == 2


# --- verify ----------------------------------------------------------------------

def test_verify_spread_partition(tmp_path):
    out = tmp_path / "r.json"
    assert run(["verify", "--suite", "spread-partition", "--q", 3, "--k", 2, "--h", 2, "--out", out]) == 0
    rep = load(out)
    assert rep["status"] == "PASS"
    assert rep["assertions"][0]["witness"]["elements"] == 10


def test_verify_theorem(tmp_path):
    out = tmp_path / "r.json"
    assert run(["verify", "--suite", "theorem-intersection", "--q", 3, "--k", 2, "--h", 4, "--r", 2,
                "--out", out]) == 0
    assert load(out)["status"] == "PASS"


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_exit_code_contract(tmp_path, suite):
    out = tmp_path / "r.json"
    code = run(["verify", "--suite", suite, "--q", 3, "--k", 2, "--h", 2, "--out", out])
    rep = load(out)
    assert code == (1 if rep["status"] == FAIL else 0)
    assert rep["status"] != FAIL, rep
    for a in rep["assertions"]:
        if a["status"] == FAIL:
            assert a["witness"]


def test_verify_over_cap_is_skipped(tmp_path, monkeypatch):
    monkeypatch.setenv("SPREADLAB_CAP", "50")
    out = tmp_path / "r.json"
    assert run(["verify", "--suite", "segre", "--q", 3, "--k", 2, "--h", 4, "--out", out]) == 0
    assert load(out)["status"] == SKIPPED
    assert run(["spread", "build", "--q", 3, "--k", 2, "--h", 4]) == 2


# --- sweeps -------------------------------------------------------------------------

def test_empty_sweep(tmp_path):
    cfg = write(tmp_path / "cfg.json", {"tuples": []})
    assert run(["sweep", "--config", cfg, "--out-dir", tmp_path / "out"]) == 0
    index = load(tmp_path / "out" / "index.json")
    assert index["entries"] == [] and index["status"] == "PASS"


def test_sweep_skips_over_cap_tuple(tmp_path):
    cfg = write(tmp_path / "cfg.json", {"tuples": [[3, 3, 6, 2]]})
    assert run(["sweep", "--config", cfg, "--out-dir", tmp_path / "out"]) == 0
    index = load(tmp_path / "out" / "index.json")
    assert index["entries"] and all(e["status"] == SKIPPED for e in index["entries"])
    for e in index["entries"]:
        assert load(tmp_path / "out" / e["report"])["status"] == SKIPPED


def test_default_sweep_passes(tmp_path):
    out = tmp_path / "out"
    assert run(["sweep", "--out-dir", out, "--workers", 2]) == 0
    index = load(out / "index.json")
    assert set(index["matrix"]) == {"3,2,2", "2,2,4,2", "3,2,4,2", "2,3,2"}
    assert all(e["status"] == "PASS" for e in index["entries"])
    for e in index["entries"]:
        assert (out / e["report"]).exists()


def test_sweep_config_validation(tmp_path):
    cfg = write(tmp_path / "cfg.json", {"tuples": [[3, 2]]})
    assert run(["sweep", "--config", cfg, "--out-dir", tmp_path / "out"]) == 2
    cfg = write(tmp_path / "cfg.json", {"tuples": [[3, 2, 2]], "suites": ["nope"]})
    assert run(["sweep", "--config", cfg, "--out-dir", tmp_path / "out"]) == 2


# --- export and round trips ---------------------------------------------------------

@pytest.mark.parametrize("kind", ["tower", "spread", "singer-spread", "segre", "pseudo-arc"])
def test_export_is_deterministic(tmp_path, kind):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["export", kind, "--q", 3, "--k", 2, "--h", 2, "--out", a]) == 0
    assert run(["export", kind, "--q", 3, "--k", 2, "--h", 2, "--out", b]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert load(a)["schema_version"] == 1


def test_export_generalized_needs_r(tmp_path):
    assert run(["export", "generalized-segre", "--q", 2, "--k", 2, "--h", 4]) == 2
    out = tmp_path / "g.json"
    assert run(["export", "generalized-segre", "--q", 2, "--k", 2, "--h", 4, "--r", 2, "--out", out]) == 0


def test_json_round_trips(tmp_path):
    D = build_spread(2, 2, 4)
    assert Spread.from_json(json.loads(json.dumps(D.to_json()))) == D
    S = PointSet(3, 3, 2, ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)))
    assert PointSet.from_json(json.loads(json.dumps(S.to_json()))) == S
    out = tmp_path / "r.json"
    run(["verify", "--suite", "singer", "--q", 3, "--k", 2, "--h", 2, "--out", out])
    rep = VerificationReport.from_json(load(out))
    assert rep.to_json() == load(out)
