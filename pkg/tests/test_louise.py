import json
import random
import time

import pytest

from plabic_louise import affine_perm as ap
from plabic_louise import louise as lo
from plabic_louise import plabic as pl
from plabic_louise import quiver as qv
from plabic_louise.quiver import IceQuiver


def test_base_certificates():
    for window in ([1], [2]):
        c = lo.certify(window)
        assert c.case == "Base" and c.children == ()
        assert lo.verify(c)


def test_figure_root_case():
    c = lo.certify([4, 6, 5, 7, 8, 9])
    assert (c.case, c.i) == ("BridgeCover", 3)
    assert [ch.window for ch in c.children] == [(3, 6, 5, 7, 8, 10), (3, 6, 7, 5, 8, 10)]
    assert c.scenario in (1, 2) and c.x and c.y
    assert lo.verify(c)


def test_top_cell_certificate():
    assert lo.verify(lo.certify(ap.top_cell(3, 6)))


@pytest.mark.parametrize("n", range(1, 7))
def test_certify_verify_exhaustive(n):
    for w in ap.enumerate_all(n):
        c = lo.certify(w)
        verdict = lo.verify(c)
        assert verdict, (w, verdict.message())
        assert c.depth() <= lo.depth_bound(w)
        for node in c.nodes():
            if node.case == "BridgeCover":
                M = pl.ice_quiver(node.window).mutable_part()
                assert M.is_source(node.x)


def test_certify_verify_random_large():
    rng = random.Random(2024)
    for n in (7, 8):
        for w in rng.sample(list(ap.enumerate_all(n)), 100):
            assert lo.verify(lo.certify(w)), w


def test_both_scenarios_and_all_cases_occur():
    cases, scenarios = set(), set()
    for w in ap.enumerate_all(6):
        for node in lo.certify(w).nodes():
            cases.add(node.case)
            if node.scenario:
                scenarios.add(node.scenario)
    assert cases == set(lo.CASES)
    assert scenarios == {1, 2}


def test_measure_decreases():
    for w in ap.enumerate_all(5):
        for node in lo.certify(w).nodes():
            m = lo.measure(ap.validate(node.window))
            for ch in node.children:
                assert lo.measure(ap.validate(ch.window)) < m


def _tamper(data, path, **changes):
    node = data
    for j in path:
        node = node["children"][j]
    node.update(changes)
    return data


def test_tampered_case_tag():
    data = lo.certify([4, 6, 5, 7, 8, 9]).to_json()
    v = lo.verify(_tamper(data, [], case="Conjugate"))
    assert not v and v.path == "root" and v.predicate


def test_tampered_child_window():
    data = lo.certify([4, 6, 5, 7, 8, 9]).to_json()
    v = lo.verify(_tamper(data, [0], window=[4, 5, 6, 7, 9, 8]))
    assert not v and v.path == "root" and v.predicate == "measure decreases"
    data = lo.certify([4, 6, 5, 7, 8, 9]).to_json()
    v = lo.verify(_tamper(data, [0, 0], case="Base", children=[]))
    assert not v and v.path == "root/0/0"


def test_tampered_scenario_and_vertices():
    c = lo.certify([4, 6, 5, 7, 8, 9])
    data = c.to_json()
    v = lo.verify(_tamper(data, [], scenario=3 - c.scenario))
    assert not v and v.predicate == "scenario tag"
    data = c.to_json()
    v = lo.verify(_tamper(data, [], x=c.y, y=c.x))
    assert not v and v.predicate == "recorded x and y"


def test_base_leaf_with_nonempty_quiver_fails():
    v = lo.verify({"window": [4, 6, 5, 7, 8, 9], "case": "Base", "children": []})
    assert not v and v.predicate == "base quiver is empty"


def test_malformed_certificate():
    v = lo.verify({"case": "Base"})
    assert not v and v.predicate == "well-formed certificate"
    v = lo.verify({"window": [2, 2], "case": "Base", "children": []})
    assert not v and "bounded affine" in v.predicate


def test_right_short_arc_variant():
    # both reduction sides of the short-arc lemma verify
    for w in ap.enumerate_all(5):
        step = pl.reduction_step(w)
        if step["case"] != "ShortArc":
            continue
        i = step["i"]
        right = ap.right(w, i)
        node = lo.CertNode(w.window, "ShortArc", i=i, side="right",
                           children=(lo.certify(right),))
        assert lo.verify(node), w


def test_certificate_json_roundtrip():
    c = lo.certify([3, 8, 7, 6, 11, 10, 9, 14, 13])
    text = json.dumps(c.to_json(), sort_keys=True)
    back = lo.CertNode.from_json(json.loads(text))
    assert back == c
    assert json.dumps(back.to_json(), sort_keys=True) == text


# -- banff_search ----------------------------------------------------------------


def test_markov_has_no_witness():
    stats = lo.SearchStats()
    t0 = time.perf_counter()
    assert lo.banff_search(qv.markov(), stats=stats) is None
    assert stats.class_size == 1
    assert time.perf_counter() - t0 < 1.0


def test_directed_cycle_needs_one_mutation():
    c = lo.banff_search(qv.directed_cycle(3))
    assert c.tag == "MutateStep"
    assert c.children[0].tag == "CoverStep"
    assert lo.verify_quiver_certificate(c)


def test_acyclic_quiver_covers_directly():
    Q = IceQuiver.from_arrows(list("abcd"), [("a", "b"), ("b", "c"), ("c", "d"), ("a", "c")])
    c = lo.banff_search(Q)
    assert c.tag == "CoverStep" and lo.verify_quiver_certificate(c)


def test_edgeless():
    c = lo.banff_search(IceQuiver.from_arrows(["a", "b"], []))
    assert c.tag == "Edgeless"


def test_limits():
    # the 3-cycle needs one mutation, so depth 0 cannot decide it
    with pytest.raises(lo.LimitExceeded):
        lo.banff_search(qv.directed_cycle(3), depth=0)
    with pytest.raises(lo.LimitExceeded):
        lo.banff_search(qv.directed_cycle(3), class_limit=1)
    with pytest.raises(ValueError):
        lo.BanffSearcher(class_limit=0)


def test_tampered_quiver_certificate():
    c = lo.banff_search(qv.directed_cycle(3))
    bad = lo.QuiverCertNode("CoverStep", qv.directed_cycle(3), s=c.children[0].s, t=c.children[0].t,
                            children=c.children[0].children)
    v = lo.verify_quiver_certificate(bad)
    assert not v


@pytest.mark.parametrize("n", range(1, 6))
def test_banff_on_constructed_quivers(n):
    for w in ap.enumerate_all(n):
        c = lo.banff_search(pl.ice_quiver(w))
        assert c is not None and lo.verify_quiver_certificate(c), w


def test_banff_deterministic():
    Q = pl.ice_quiver([3, 8, 7, 6, 11, 10, 9, 14, 13])
    a = json.dumps(lo.banff_search(Q).to_json(), sort_keys=True)
    b = json.dumps(lo.banff_search(Q).to_json(), sort_keys=True)
    assert a == b
