import random

import pytest

from plabic_louise import affine_perm as ap
from plabic_louise import plabic as pl
from plabic_louise import quiver as qv

from figures import figure_3_6, figure_rigid, figure_rigid2

FIG_BOUNDARY = {"{1,2,3}", "{2,3,4}", "{3,4,6}", "{4,5,6}", "{1,5,6}", "{1,2,6}"}
FIG_INTERNAL = {"{1,3,4}", "{1,3,6}", "{3,5,6}"}
FIG_ARROWS = sorted([
    ("{1,2,3}", "{1,3,4}"), ("{3,4,6}", "{1,3,4}"), ("{3,4,6}", "{3,5,6}"),
    ("{1,5,6}", "{3,5,6}"), ("{1,2,6}", "{1,3,6}"), ("{1,3,4}", "{2,3,4}"),
    ("{1,3,4}", "{1,3,6}"), ("{1,3,6}", "{1,2,3}"), ("{1,3,6}", "{3,4,6}"),
    ("{1,3,6}", "{1,5,6}"), ("{3,5,6}", "{1,3,6}"), ("{3,5,6}", "{4,5,6}"),
])
RIGID = [3, 8, 7, 6, 11, 10, 9, 14, 13]


def labels_by_kind(G):
    ids = G.face_ids()
    bnd = {ids[f.index] for f in G.faces if f.boundary}
    inner = {ids[f.index] for f in G.faces if not f.boundary}
    return bnd, inner


def arrows(Q):
    return sorted((u, v) for u, v, m in Q.arrows() for _ in range(m))


# -- the drawn graphs ---------------------------------------------------------------


def test_drawn_figure_graph():
    G = figure_3_6()
    assert pl.trip_permutation(G) == ap.validate([4, 6, 5, 7, 8, 9])
    assert labels_by_kind(G) == (FIG_BOUNDARY, FIG_INTERNAL)
    assert arrows(G.to_ice_quiver()) == FIG_ARROWS


def test_constructed_figure_diagram():
    G = pl.construct_diagram([4, 6, 5, 7, 8, 9])
    assert len(G.faces) == 9
    assert labels_by_kind(G) == (FIG_BOUNDARY, FIG_INTERNAL)
    Q = G.to_ice_quiver()
    assert arrows(Q) == FIG_ARROWS
    assert arrows(Q.mutable_part()) == [("{1,3,4}", "{1,3,6}"), ("{3,5,6}", "{1,3,6}")]
    assert qv.is_isomorphic(Q, figure_3_6().to_ice_quiver())


def test_drawn_rigid_graphs():
    G = figure_rigid()
    assert pl.trip_permutation(G) == ap.validate(RIGID)
    M = G.to_ice_quiver().mutable_part()
    assert qv.is_isomorphic(M, qv.directed_cycle(3))
    assert pl.square_movable_faces(G) == []
    H = figure_rigid2()
    assert pl.trip_permutation(H) == ap.conjugate(ap.validate(RIGID), 8)
    movable = pl.square_movable_faces(H)
    assert len(movable) == 1
    moved = pl.square_move(H, movable[0])
    assert qv.is_acyclic(moved.to_ice_quiver().mutable_part())


def test_constructed_rigid_diagrams():
    w = ap.validate(RIGID)
    G = pl.construct_diagram(w)
    assert qv.is_isomorphic(G.to_ice_quiver().mutable_part(), qv.directed_cycle(3))
    assert pl.square_movable_faces(G) == []
    for face in G.face_ids():
        with pytest.raises(pl.NotSquareMovable):
            pl.square_move(G, face)
    H = pl.construct_diagram(ap.conjugate(w, 8))
    movable = [f for f in pl.square_movable_faces(H) if f in H.to_ice_quiver().mutable]
    assert len(movable) == 1
    assert qv.is_acyclic(pl.square_move(H, movable[0]).to_ice_quiver().mutable_part())


# -- small graphs -----------------------------------------------------------------


def test_lollipops():
    for color, window in ((pl.WHITE, [1]), (pl.BLACK, [2])):
        G = pl.lollipop_graph(color)
        G.check()
        assert pl.trip_permutation(G) == ap.validate(window)
        assert len(G.faces) == 1
        assert [len(s) for s in G.face_labels()] == [window[0] - 1]
        assert G.to_ice_quiver().mutable == ()


def test_type_1_2_bridge_graph():
    pair = pl.construct_diagram([1, 4])
    G = pl.add_bridge(pair, 1, "target")
    G.check()
    assert G.trip(1).end == 2 and G.trip(2).end == 1
    assert pl.trip_permutation(G) == ap.validate([2, 3])
    assert len(G.faces) == 2
    with pytest.raises(pl.HypothesisViolated):
        pl.add_bridge_surgeries(pair, 1, "v")


def test_top_cell():
    G = pl.construct_diagram(ap.top_cell(3, 6))
    assert pl.trip_permutation(G) == ap.validate([4, 5, 6, 7, 8, 9])
    assert len(G.faces) == 10


def test_inconsistent_lift():
    G = pl.construct_diagram([4, 6, 5, 7, 8, 9])
    with pytest.raises(pl.InconsistentLift):
        pl.trip_permutation(G, k=2)


def test_json_roundtrip():
    G = pl.construct_diagram([4, 6, 5, 7, 8, 9])
    data = G.to_json()
    assert set(data) >= {"n", "vertices", "boundary_legs", "rotation"}
    H = pl.PlabicGraph.from_json(data)
    assert H.canonical_key() == G.canonical_key()
    assert pl.trip_permutation(H) == pl.trip_permutation(G)
    bad = dict(data, rotation={**data["rotation"]})
    v = next(iter(bad["rotation"]))
    bad["rotation"][v] = bad["rotation"][v][:-1]
    with pytest.raises(pl.MalformedRotationSystem):
        pl.PlabicGraph.from_json(bad)


# -- exhaustive invariants -----------------------------------------------------------


def all_perms(max_n):
    for n in range(1, max_n + 1):
        yield from ap.enumerate_all(n)


@pytest.mark.parametrize("n", range(1, 7))
def test_round_trip_and_face_count(n):
    for w in ap.enumerate_all(n):
        G = pl.construct_diagram(w)
        G.check()
        assert pl.trip_permutation(G, w.k) == w
        assert len(G.faces) == w.k * (n - w.k) - ap.length(w) + 1


@pytest.mark.parametrize("n", range(1, 7))
def test_labels_have_size_k_and_are_distinct(n):
    for w in ap.enumerate_all(n):
        G = pl.construct_diagram(w)
        for conv in ("target", "source"):
            labels = G.face_labels(conv)
            assert all(len(s) == w.k for s in labels)
            assert len(set(labels)) == len(labels)
        # source labels are the target labels pulled back along w
        tgt, src = G.face_labels("target"), G.face_labels("source")
        back = {w(j) % n or n: j for j in range(1, n + 1)}
        assert [frozenset(back[x] for x in s) for s in tgt] == list(src)


@pytest.mark.parametrize("n", range(2, 7))
def test_nesting_strands_do_not_cross(n):
    for w in ap.enumerate_all(n):
        G = pl.construct_diagram(w)
        crossing = pl.crossing_pairs(G)
        for p in range(1, n + 1):
            for q in range(p + 1, p + n):
                r, s = w(q), w(p)
                if q < r < s:
                    assert frozenset((p, (q - 1) % n + 1)) not in crossing, (w, p, q)


@pytest.mark.parametrize("n", range(1, 6))
def test_square_move_commutes_with_mutation(n):
    for w in ap.enumerate_all(n):
        G = pl.construct_diagram(w)
        Q = G.to_ice_quiver()
        for face in pl.square_movable_faces(G):
            H = pl.square_move(G, face)
            assert pl.trip_permutation(H) == w
            R = H.to_ice_quiver()
            expected = qv.mutate(Q, face)
            assert qv.is_isomorphic(R, expected)
            # the mutated face is the only one whose label changes
            new = (set(R.vertices) - set(Q.vertices)).pop()
            assert R == expected.relabel({face: new})
            back = pl.square_move(H, new)
            assert back.to_ice_quiver() == Q


@pytest.mark.parametrize("n", range(4, 7))
def test_bridge_surgeries(n):
    seen = 0
    for v in ap.enumerate_all(n):
        for i in range(1, n + 1):
            try:
                pl.covers_hypotheses(v, i)
            except pl.HypothesisViolated:
                continue
            u = ap.conjugate(v, i)
            D = pl.construct_diagram(u)
            faces = len(D.faces)
            expect = {"s_iv": ap.left(v, i), "vs_i": ap.right(v, i), "v": v}
            for variant, target in expect.items():
                E = pl.add_bridge_surgeries(D, i, variant)
                E.check()
                assert pl.trip_permutation(E) == target
                assert len(E.faces) == faces + (2 if variant == "v" else 1)
            seen += 1
    assert seen > 0


def test_surgery_hypotheses_checked():
    D = pl.construct_diagram([4, 5, 6, 7, 8, 9])
    with pytest.raises(pl.HypothesisViolated):
        pl.add_bridge_surgeries(D, 1, "v")


def test_add_and_remove_lollipop():
    G = pl.construct_diagram([4, 6, 5, 7, 8, 9])
    for i in range(1, 8):
        for color in (pl.WHITE, pl.BLACK):
            H = pl.add_lollipop(G, i, color)
            H.check()
            w = ap.insert_lollipop(ap.validate([4, 6, 5, 7, 8, 9]), i, color)
            assert pl.trip_permutation(H) == w
            assert qv.mutable_isomorphic(H.to_ice_quiver(), G.to_ice_quiver())
            assert pl.remove_lollipop(H, i).canonical_key() == G.canonical_key()


def _subdivide_random_edge(G, rng):
    B = pl._Builder(G)
    inner = [e for e, (a, b) in B.edges.items() if not pl.is_boundary(a) and not pl.is_boundary(b)]
    if not inner:
        return G
    e = rng.choice(inner)
    a, b = B.edges[e]
    x = B.new_vertex(rng.choice([pl.WHITE, pl.BLACK]))
    e2 = B.new_edge(x, b)
    B.edges[e] = [a, x]
    B.rotation[b] = [2 * e2 + 1 if h == 2 * e + 1 else h for h in B.rotation[b]]
    B.rotation[x] = [2 * e + 1, 2 * e2]
    return B.freeze()


def test_cleanup_restores_normal_form():
    rng = random.Random(11)
    for w in ap.enumerate_all(5):
        G = pl.construct_diagram(w)
        assert pl.cleanup_moves(G).canonical_key() == G.canonical_key()
        H = _subdivide_random_edge(G, rng)
        H.check()
        assert pl.trip_permutation(H) == w
        assert pl.cleanup_moves(H).canonical_key() == G.canonical_key()


def test_cleanup_keeps_boundary_connector():
    G = pl.construct_diagram([2, 3])
    assert len(G.colors) == 1 and G.degree(next(iter(G.colors))) == 2
    assert pl.cleanup_moves(G).canonical_key() == G.canonical_key()


def test_figure_runtime():
    import time
    pl._construct.cache_clear()
    t0 = time.perf_counter()
    G = pl.construct_diagram([4, 6, 5, 7, 8, 9])
    G.to_ice_quiver()
    assert time.perf_counter() - t0 < 1.0


def test_dot_export():
    G = pl.construct_diagram([4, 6, 5, 7, 8, 9])
    dot = pl.to_dot(G)
    assert dot.startswith("graph plabic {")
    assert dot.count(" -- ") == len(G.edges)
    assert dot == pl.to_dot(pl.construct_diagram([4, 6, 5, 7, 8, 9]))
