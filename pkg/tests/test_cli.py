import json

import pytest

from graphmonoid.cli import EXIT_INVALID, EXIT_OK, EXIT_UNDECIDED, run
from graphmonoid.graphs import graph_to_json
from graphmonoid.presentation import MonoidElement, element_to_json, sgen, vgen

from conftest import diamond, emitter_to_sink, single_edge


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return write


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_validate_ok(files, capsys):
    path = files("g.json", graph_to_json(diamond()))
    code, out = invoke(capsys, "validate", "--graph", path)
    assert code == EXIT_OK
    assert json.loads(out) == {"valid": True, "violations": []}


def test_validate_reports_violations_with_exit_zero(files, capsys):
    path = files("g.json", {"vertices": ["v"], "edges": [{"id": "e", "src": "v", "dst": "q"}]})
    code, out = invoke(capsys, "validate", "--graph", path)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["valid"] is False and doc["violations"]


def test_malformed_json_exit_code_and_location(files, capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [', encoding="utf-8")
    code, out = invoke(capsys, "validate", "--graph", str(bad))
    assert code == EXIT_INVALID
    assert "line" in json.loads(out)["error"]


def test_present(files, capsys):
    path = files("g.json", graph_to_json(single_edge()))
    code, out = invoke(capsys, "present", "--graph", path)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["generators"] == [{"kind": "v", "v": "v"}, {"kind": "v", "v": "w"}]
    assert len(doc["relations"]) == 1


def test_normal_form(files, capsys):
    g = files("g.json", graph_to_json(single_edge()))
    x = files("x.json", element_to_json(MonoidElement.single(vgen("v"))))
    code, out = invoke(capsys, "normal-form", "--graph", g, "--element", x)
    assert code == EXIT_OK
    assert json.loads(out)["normal_form"] == {"terms": [{"gen": {"kind": "v", "v": "w"}, "mult": 1}]}


def test_equal_true_and_false_both_exit_zero(files, capsys):
    g = emitter_to_sink(2)
    gp = files("g.json", graph_to_json(g))
    aw = MonoidElement.single(vgen("w"))
    s0 = MonoidElement.single(sgen(g, "v", ["e0"])) + aw
    s1 = MonoidElement.single(sgen(g, "v", ["e1"])) + aw
    u = files("u.json", element_to_json(s0))
    v = files("v.json", element_to_json(s1))
    z = files("z.json", element_to_json(MonoidElement()))
    code, out = invoke(capsys, "equal", "--graph", gp, "--lhs", u, "--rhs", v)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["equal"] is True and doc["certificate"]["kind"] == "chain"
    code, out = invoke(capsys, "equal", "--graph", gp, "--lhs", u, "--rhs", z)
    assert code == EXIT_OK
    assert json.loads(out)["equal"] is False


def test_budget_exhaustion_exit_code(files, capsys):
    g = emitter_to_sink(3)
    gp = files("g.json", graph_to_json(g))
    u = files("u.json", element_to_json(MonoidElement.single(vgen("v"))))
    code, out = invoke(capsys, "--budget", "0", "equal", "--graph", gp, "--lhs", u, "--rhs", u)
    assert code == EXIT_UNDECIDED
    assert json.loads(out)["undecided"] is True


def test_desingularize_with_boundary(files, capsys):
    gp = files("g.json", graph_to_json(emitter_to_sink(1)))
    code, out = invoke(capsys, "desingularize", "--graph", gp, "--level", "2")
    assert code == EXIT_OK
    doc = json.loads(out)
    flagged = [v["id"] for v in doc["vertices"] if isinstance(v, dict) and v.get("boundary")]
    assert sorted(flagged) == ["w2(v)", "w2(w)"]


def test_phi_psi_round_trip(files, capsys):
    g = emitter_to_sink(2)
    gp = files("g.json", graph_to_json(g))
    x = MonoidElement.single(sgen(g, "v", ["e1"]))
    xp = files("x.json", element_to_json(x))
    code, out = invoke(capsys, "phi", "--graph", gp, "--element", xp)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["level"] == 3
    yp = files("y.json", doc["element"])
    code, out = invoke(capsys, "psi", "--graph", gp, "--element", yp, "--level", "3")
    assert code == EXIT_OK


def test_phi_truncation_error_reports_level(files, capsys):
    g = emitter_to_sink(3)
    gp = files("g.json", graph_to_json(g))
    x = files("x.json", element_to_json(MonoidElement.single(sgen(g, "v", ["e2"]))))
    code, out = invoke(capsys, "phi", "--graph", gp, "--element", x, "--level", "1")
    assert code == EXIT_INVALID
    assert json.loads(out)["required_level"] == 4


def test_ck_check_and_induced_map(files, capsys):
    e2, e3 = emitter_to_sink(2), emitter_to_sink(3)
    sp = files("s.json", graph_to_json(e2))
    tp = files("t.json", graph_to_json(e3))
    mp = files(
        "m.json",
        {
            "vertex_map": {v: v for v in e2.vertices},
            "edge_map": {e.id: e.id for e in e2.edges},
        },
    )
    code, out = invoke(capsys, "ck-check", "--morphism", mp, "--source", sp, "--target", tp)
    assert code == EXIT_OK
    assert json.loads(out) == {"ck": True, "violations": []}
    code, out = invoke(capsys, "induced-map", "--morphism", mp, "--source", sp, "--target", tp)
    assert code == EXIT_OK
    assert len(json.loads(out)["map"]) == 2 + (2**2 - 1)


def test_ck_check_structural_error_is_invalid_input(files, capsys):
    e2 = emitter_to_sink(2)
    sp = files("s.json", graph_to_json(e2))
    mp = files("m.json", {"vertex_map": {}, "edge_map": {}})
    code, out = invoke(capsys, "ck-check", "--morphism", mp, "--source", sp, "--target", sp)
    assert code == EXIT_INVALID


def test_colimit_and_continuity(files, capsys):
    graphs = [emitter_to_sink(k) for k in (1, 2, 3)]
    morphs = []
    for small, big in zip(graphs, graphs[1:]):
        morphs.append(
            {
                "vertex_map": {v: v for v in small.vertices},
                "edge_map": {e.id: e.id for e in small.edges},
            }
        )
    sp = files("sys.json", {"graphs": [graph_to_json(g) for g in graphs], "morphisms": morphs})
    code, out = invoke(capsys, "colimit", "--system", sp)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["graph"] == graph_to_json(graphs[-1])
    assert len(doc["injections"]) == 3
    code, out = invoke(capsys, "continuity-check", "--system", sp, "--degree", "2")
    assert code == EXIT_OK
    assert json.loads(out)["ok"] is True


def test_continuity_against_extension_top(files, capsys):
    graphs = [emitter_to_sink(k) for k in (1, 2)]
    morphs = [
        {
            "vertex_map": {v: v for v in graphs[0].vertices},
            "edge_map": {e.id: e.id for e in graphs[0].edges},
        }
    ]
    sp = files("sys.json", {"graphs": [graph_to_json(g) for g in graphs], "morphisms": morphs})
    big = emitter_to_sink(3)
    tp = files("top.json", graph_to_json(big))
    ip = files(
        "into.json",
        {
            "vertex_map": {v: v for v in graphs[1].vertices},
            "edge_map": {e.id: e.id for e in graphs[1].edges},
        },
    )
    code, out = invoke(capsys, "continuity-check", "--system", sp, "--top", tp, "--into", ip)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["ok"] is False and doc["uncovered_generators"]  # e2 generators unreached
    assert doc["mismatches"] == []


def test_induced_map_refuses_non_ck(files, capsys):
    small = single_edge()
    big_doc = {
        "vertices": ["v", "w", "z"],
        "edges": [
            {"id": "e", "src": "v", "dst": "w"},
            {"id": "x", "src": "v", "dst": "z"},
        ],
        "infinite_emitters": {},
    }
    sp = files("s.json", graph_to_json(small))
    tp = files("t.json", big_doc)
    mp = files("m.json", {"vertex_map": {"v": "v", "w": "w"}, "edge_map": {"e": "e"}})
    code, out = invoke(capsys, "induced-map", "--morphism", mp, "--source", sp, "--target", tp)
    assert code == EXIT_INVALID
    assert "CK" in json.loads(out)["error"]


def test_oracle_check_deterministic(files, capsys):
    gp = files("g.json", graph_to_json(diamond()))
    code, first = invoke(capsys, "oracle-check", "--graph", gp, "--samples", "25", "--seed", "7")
    assert code == EXIT_OK
    doc = json.loads(first)
    assert doc["agreements"] == 25 and doc["discrepancies"] == 0
    _, second = invoke(capsys, "oracle-check", "--graph", gp, "--samples", "25", "--seed", "7")
    assert first == second


def test_text_format(files, capsys):
    gp = files("g.json", graph_to_json(diamond()))
    code, out = invoke(capsys, "--format", "text", "validate", "--graph", gp)
    assert code == EXIT_OK
    assert "valid: True" in out


def test_unknown_flag_is_invalid(files, capsys):
    gp = files("g.json", graph_to_json(diamond()))
    assert run(["validate", "--graph", gp, "--nonsense"]) == EXIT_INVALID
