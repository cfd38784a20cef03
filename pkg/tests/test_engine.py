import numpy as np
import pytest

from graphmonoid.engine import (
    BudgetExceededError,
    EngineError,
    certificate_to_json,
    complete,
    completed_system,
    congruence_bfs,
    elements_up_to_degree,
    equal,
    normal_form,
    replay_chain,
)
from graphmonoid.presentation import (
    MonoidElement,
    Presentation,
    presentation_of,
    sgen,
    vgen,
)

from conftest import diamond, emitter_to_sink, rose, single_edge, single_sink


def single(v):
    return MonoidElement.single(vgen(v))


def pres(gens, rels):
    return Presentation(tuple(vgen(v) for v in gens), tuple(rels))


def test_complete_empty_relations():
    rs = complete(pres("vw", []))
    assert rs.completed and rs.rule_count == 0


def test_complete_single_relation_orientation():
    rs = complete(pres("vw", [(single("v"), single("w"))]))
    assert rs.rule_count == 1
    lhs, rhs = rs.rule(0)
    assert (lhs, rhs) == (single("v"), single("w"))  # a_v is greater in the order


def test_complete_doubling_rule():
    # hand completion: a single rule 2a_v -> a_v, no critical pairs arise
    rs = complete(pres("vw", [(2 * single("v"), single("v"))]))
    assert rs.rule_count == 1
    assert rs.rule(0) == (2 * single("v"), single("v"))
    assert normal_form(rs, 2 * single("v")) == single("v")
    assert normal_form(rs, single("w")) == single("w")
    assert normal_form(rs, MonoidElement()) == MonoidElement()


def test_rose_normal_form_matches_bfs_oracle():
    p = presentation_of(rose(2))
    # BFS over relation applications at depth <= 2 already identifies 3a_v with a_v
    reach = congruence_bfs(p, 3 * single("v"), 2)
    assert single("v") in reach and 2 * single("v") in reach
    rs = completed_system(p)
    assert normal_form(rs, 3 * single("v")) == single("v")


def test_acyclic_normal_form():
    rs = completed_system(presentation_of(single_edge()))
    assert normal_form(rs, single("v")) == single("w")
    assert normal_form(rs, MonoidElement()) == MonoidElement()


def test_uncompleted_system_refused():
    rs = complete(pres("v", []))
    broken = type(rs)(rs.presentation, rs.lhs, rs.rhs, rs.proofs, False, 0)
    with pytest.raises(EngineError):
        normal_form(broken, single("v"))


def test_equal_emitter_examples():
    g = emitter_to_sink(2)
    p = presentation_of(g)
    aw, av = single("w"), single("v")
    s0 = MonoidElement.single(sgen(g, "v", ["e0"]))
    s1 = MonoidElement.single(sgen(g, "v", ["e1"]))
    s01 = MonoidElement.single(sgen(g, "v", ["e0", "e1"]))
    assert equal(p, s0 + aw, s1 + aw)
    assert equal(p, av, s01 + 2 * aw)
    assert not equal(p, av, MonoidElement())


def test_equality_of_zero_is_syntactic():
    for g in (single_sink(), diamond(), emitter_to_sink(2)):
        p = presentation_of(g)
        assert equal(p, MonoidElement(), MonoidElement())
        for gen in p.alphabet:
            assert not equal(p, MonoidElement.single(gen), MonoidElement())


def test_bfs_examples():
    p = presentation_of(rose(2))
    av = single("v")
    assert congruence_bfs(p, av, 0) == {av}
    assert congruence_bfs(p, av, 1) == {av, 2 * av}
    q = presentation_of(single_edge())
    assert congruence_bfs(q, single("v"), 1) == {single("v"), single("w")}


def test_bfs_rejects_negative_depth():
    with pytest.raises(EngineError):
        congruence_bfs(presentation_of(single_sink()), MonoidElement(), -1)


def test_certificate_replays():
    g = emitter_to_sink(3)
    p = presentation_of(g)
    u = single("v") + single("w")
    v = MonoidElement.single(sgen(g, "v", ["e0", "e2"])) + 3 * single("w")
    result = equal(p, u, v)
    assert result.equal
    assert replay_chain(p, u, result.chain) == v
    doc = certificate_to_json(p, u, result)
    assert doc["kind"] == "chain"
    assert all(set(step) == {"relation", "direction", "context"} for step in doc["steps"])


def test_certificate_separates():
    p = presentation_of(diamond())
    result = equal(p, single("v"), single("u"))
    assert not result.equal
    assert result.lhs_normal_form != result.rhs_normal_form
    assert certificate_to_json(p, single("v"), result)["kind"] == "separated"


def test_equal_iff_normal_forms_match():
    g = emitter_to_sink(2)
    p = presentation_of(g)
    rs = completed_system(p)
    vectors = elements_up_to_degree(len(p.alphabet), 3)
    from graphmonoid.engine import _unvec

    elems = [_unvec(v, p.alphabet) for v in vectors]
    for x in elems[:40]:
        for y in elems[:40]:
            assert bool(equal(p, x, y)) == (normal_form(rs, x) == normal_form(rs, y))


def test_normal_form_idempotent():
    p = presentation_of(emitter_to_sink(2))
    rs = completed_system(p)
    for v in elements_up_to_degree(len(p.alphabet), 3):
        from graphmonoid.engine import _unvec

        x = _unvec(v, p.alphabet)
        nf = normal_form(rs, x)
        assert normal_form(rs, nf) == nf
        assert equal(p, nf, x)


def test_completion_is_deterministic():
    p = presentation_of(emitter_to_sink(3))
    a, b = complete(p), complete(p)
    assert np.array_equal(a.lhs, b.lhs)
    assert np.array_equal(a.rhs, b.rhs)
    assert a.proofs == b.proofs


def test_budget_exhaustion_is_explicit():
    p = presentation_of(emitter_to_sink(3))
    with pytest.raises(BudgetExceededError) as err:
        complete(p, budget=0)
    assert err.value.budget == 0


def test_completeness_against_bfs_small():
    # exhaustive degree-3 pairs on a few small graphs, BFS verdicts at depth 6
    from graphmonoid.engine import _unvec, bfs_reach

    for g in (single_edge(), rose(2), diamond(), emitter_to_sink(1)):
        p = presentation_of(g)
        rs = completed_system(p)
        vecs = elements_up_to_degree(len(p.alphabet), 3)
        nfs = [normal_form(rs, _unvec(v, p.alphabet)) for v in vecs]
        elems = [_unvec(v, p.alphabet) for v in vecs]
        index = {tuple(int(c) for c in v): i for i, v in enumerate(vecs)}
        for i, x in enumerate(elems):
            reach, saturated = bfs_reach(p, x, 6)
            for key, j in index.items():
                if key in reach:
                    assert nfs[i] == nfs[j], f"BFS joins {x} and {elems[j]}, engine separates"
                elif saturated:
                    assert nfs[i] != nfs[j], f"engine joins {x} and {elems[j]}, BFS class is closed"


def test_alphabet_mismatch_rejected():
    p = presentation_of(single_sink())
    with pytest.raises(EngineError):
        equal(p, single("zz"), MonoidElement())


def test_certificates_replay_on_seeded_pairs():
    import random

    from conftest import emitter_mixed

    rng = random.Random(17)
    for g in (emitter_mixed(3), emitter_to_sink(2), diamond()):
        p = presentation_of(g)
        for _ in range(30):
            counts_u = {rng.choice(p.alphabet): rng.randint(0, 2) for _ in range(3)}
            counts_v = {rng.choice(p.alphabet): rng.randint(0, 2) for _ in range(3)}
            u = MonoidElement.from_counts(counts_u)
            v = MonoidElement.from_counts(counts_v)
            result = equal(p, u, v)
            if result.equal:
                assert replay_chain(p, u, result.chain) == v


def test_confluence_under_random_application_order():
    # a completed system must reach the same normal form no matter which
    # applicable rule fires at each step, not just lowest-index-first
    import random

    from graphmonoid.engine import _unvec, _vec
    from conftest import emitter_mixed

    rng = random.Random(23)
    for g in (emitter_to_sink(3), emitter_mixed(3), diamond(), rose(3)):
        p = presentation_of(g)
        rs = completed_system(p)
        index = p.index()
        for _ in range(25):
            counts = {rng.choice(p.alphabet): rng.randint(1, 3) for _ in range(rng.randint(0, 4))}
            x = MonoidElement.from_counts(counts)
            expected = normal_form(rs, x)
            y = _vec(x, index)
            while True:
                applicable = [k for k in range(rs.rule_count) if (rs.lhs[k] <= y).all()]
                if not applicable:
                    break
                k = rng.choice(applicable)
                y = y - rs.lhs[k] + rs.rhs[k]
            assert _unvec(y, p.alphabet) == expected


def test_budget_env_variable(monkeypatch):
    monkeypatch.setenv("GRAPHMONOID_BUDGET", "0")
    from graphmonoid.engine import resolve_budget

    assert resolve_budget(None) == 0
    assert resolve_budget(500) == 500
    with pytest.raises(BudgetExceededError):
        complete(presentation_of(emitter_to_sink(3)))
