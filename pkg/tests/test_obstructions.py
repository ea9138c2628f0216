import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rootedk4 import (
    CLASS_MINIMUM_SIZE,
    CLASS_NAMES,
    Graph,
    Obstruction,
    PlusGraph,
    VertexType,
    build_class,
    classify_vertex,
    cofacial_obstruction,
    oracle_rooted_minor,
    random_obstruction,
    random_web,
    strip_pendant_pair,
    verify_obstruction,
    verify_web,
    web_completion,
)
from rootedk4.graph_core import planar_embed
from rootedk4.obstructions import attach_clique, join_at_cut_pair

C4_WEB = Graph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])

# wheel on a quadrilateral rim: the smallest web with an internal vertex
W4 = Graph(
    "abcdh",
    [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"),
     ("h", "a"), ("h", "b"), ("h", "c"), ("h", "d")],
)


def build_minimum(klass):
    if klass == "A":
        return build_class("A", p="p", q="q", pendants=("x", "y", "z"))
    if klass == "B":
        return build_class("B", p="p", q="q", pendants=("w", "x", "y", "z"))
    if klass == "C":
        return build_class(
            "C", triangle=("u", "v", "w"), left_pair=("a", "b"), right_pair=("c", "d")
        )
    if klass == "D":
        return build_class("D", core=C4_WEB, outer=("a", "b", "c", "d"))
    if klass == "E":
        return build_class(
            "E", core=C4_WEB, outer=("a", "b", "c", "d"), pendants=("x", "y")
        )
    if klass == "F":
        return build_class(
            "F",
            core=C4_WEB,
            outer=("a", "b", "c", "d"),
            pair_pq=("w", "x"),
            pair_rs=("y", "z"),
        )
    raise AssertionError(klass)


# -- class builders ----------------------------------------------------------


@pytest.mark.parametrize("klass", sorted(CLASS_NAMES))
def test_build_minimum_class_round_trip(klass):
    ob = build_minimum(klass)
    assert ob.klass == klass
    g = ob.plus.derived_graph()
    assert g.n == CLASS_MINIMUM_SIZE[klass]
    ok, why = verify_obstruction(g, ob.nominated, ob)
    assert ok, why
    assert oracle_rooted_minor(g, ob.nominated) is None


def test_class_a_base_is_k113():
    ob = build_minimum("A")
    expect = nx.complete_multipartite_graph(1, 1, 3)
    assert nx.is_isomorphic(ob.base.to_networkx(), expect)


def test_class_d_four_cycle_web():
    ob = build_minimum("D")
    assert ob.base == C4_WEB
    assert not ob.plus.cliques
    assert ob.embedding is not None


def test_class_b_is_k24_plus_edge():
    ob = build_minimum("B")
    expect = nx.complete_bipartite_graph(2, 4)
    expect.add_edge(0, 1)
    assert nx.is_isomorphic(ob.base.to_networkx(), expect)


def test_build_class_rejects_bad_web_core():
    # a quadrilateral with a pendant internal vertex is not a web
    broken = C4_WEB.add_vertices(["x"]).add_edges([("x", "a")])
    with pytest.raises(ValueError):
        build_class("D", core=broken, outer=("a", "b", "c", "d"))


def test_build_class_rejects_nominated_inside_clique():
    with pytest.raises(ValueError):
        build_class(
            "D",
            core=W4,
            outer=("a", "b", "c", "d"),
            cliques={frozenset("abh"): frozenset("x")},
        ).plus
        # above should already raise; cliques may never hold nominated ids
        build_class(
            "D",
            core=W4,
            outer=("a", "b", "c", "d"),
            cliques={frozenset("abh"): frozenset("a")},
        )


# -- verification ------------------------------------------------------------


def test_verify_rejects_k4():
    k4 = Graph(range(4), itertools.combinations(range(4), 2))
    ob = build_class("D", core=Graph(range(4), [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]),
                     outer=(0, 1, 2, 3))
    ok, why = verify_obstruction(k4, (0, 1, 2, 3), ob)
    assert not ok and why == "spanning-edges"


def test_verify_rejects_root_mismatch():
    ob = build_minimum("D")
    g = ob.plus.derived_graph().add_vertices(["e"]).add_edges([("e", "a")])
    assert verify_obstruction(g, ("a", "b", "c", "e"), ob)[0] is False


def test_verify_rejects_triangle_that_is_not_a_face():
    ob = build_class("D", core=W4, outer=("a", "b", "c", "d"))
    # smuggle a rim chord into the base: triangles abc/ahc can no longer
    # both be faces, so the web predicate must fail
    tampered = Obstruction(
        klass="D",
        plus=PlusGraph(W4.add_edges([("a", "c")]), {}),
        nominated=ob.nominated,
        anchors=ob.anchors,
        embedding=ob.embedding,
    )
    g = tampered.plus.derived_graph()
    ok, why = verify_obstruction(g, ob.nominated, tampered)
    assert not ok


def test_verify_rejects_tampered_clique_key():
    ob = build_class("D", core=W4, outer=("a", "b", "c", "d"))
    bad = Obstruction(
        klass="D",
        plus=PlusGraph(W4, {frozenset("abc"): frozenset("x")}),  # abc is no triangle
        nominated=ob.nominated,
        anchors=ob.anchors,
        embedding=ob.embedding,
    )
    ok, why = verify_obstruction(bad.plus.derived_graph(), ob.nominated, bad)
    assert not ok


def test_plusgraph_validate_rejections():
    ok, why = PlusGraph(W4, {frozenset("abd"): frozenset("x")}).validate()
    assert not ok and why == "plus:clique-key-not-a-triangle"
    ok, why = PlusGraph(W4, {frozenset("abh"): frozenset("a")}).validate()
    assert not ok and why == "plus:clique-overlaps-base"
    ok, why = PlusGraph(
        W4,
        {frozenset("abh"): frozenset("x"), frozenset("bch"): frozenset("x")},
    ).validate()
    assert not ok and why == "plus:cliques-overlap"


def test_derived_graph_joins_cliques():
    pg = PlusGraph(W4, {frozenset("abh"): frozenset(("x", "y"))})
    g = pg.derived_graph()
    for t in "abh":
        assert g.has_edge("x", t) and g.has_edge("y", t)
    assert g.has_edge("x", "y")
    assert not g.has_edge("x", "c")


def test_attach_clique_keeps_class():
    ob = build_minimum("A")
    t = next(iter({frozenset(t) for t in
                   itertools.combinations(ob.base.vertices, 3)
                   if all(ob.base.has_edge(x, y)
                          for x, y in itertools.combinations(t, 2))}))
    ob2 = attach_clique(ob, t, {"extra"})
    assert ob2.klass == "A"
    g2 = ob2.plus.derived_graph()
    ok, why = verify_obstruction(g2, ob2.nominated, ob2)
    assert ok, why


# -- vertex types ------------------------------------------------------------


def test_classify_web_quad_vertex_type1():
    ob = build_minimum("D")
    assert classify_vertex(ob, "a") is VertexType.TYPE1


def test_classify_class_a_degree4_vertex_type2():
    ob = build_minimum("A")
    assert classify_vertex(ob, "p") is VertexType.TYPE2
    assert classify_vertex(ob, "x") is VertexType.TYPE3


def test_classify_class_b_all_type3():
    ob = build_minimum("B")
    assert all(classify_vertex(ob, x) is VertexType.TYPE3 for x in ob.nominated)


def test_classify_rejects_unnominated():
    with pytest.raises(ValueError):
        classify_vertex(build_minimum("A"), "q")


@pytest.mark.parametrize("klass", sorted(CLASS_NAMES))
def test_classify_total_on_random_obstructions(klass):
    rng = random.Random(5)
    for _ in range(10):
        ob = random_obstruction(rng, klass, 10)
        for x in ob.nominated:
            assert classify_vertex(ob, x) in VertexType


# -- sampled generators ------------------------------------------------------


def test_random_web_sizes_and_validity():
    rng = random.Random(1)
    for size in range(4, 13):
        core, outer = random_web(rng, size)
        assert core.n == size
        ok, why = verify_web(core, outer)
        assert ok, why


def test_random_web_fixed_seed_reproduces():
    a = random_web(random.Random(99), 9)
    b = random_web(random.Random(99), 9)
    assert a == b


@pytest.mark.parametrize("klass", sorted(CLASS_NAMES))
def test_random_obstruction_verifies(klass):
    rng = random.Random(7)
    for budget in (CLASS_MINIMUM_SIZE[klass], 9, 12):
        ob = random_obstruction(rng, klass, budget)
        assert ob.klass == klass
        g = ob.plus.derived_graph()
        assert g.n <= budget
        ok, why = verify_obstruction(g, ob.nominated, ob)
        assert ok, why


def test_random_obstruction_rejects_tiny_budget():
    rng = random.Random(0)
    for klass in sorted(CLASS_NAMES):
        with pytest.raises(ValueError):
            random_obstruction(rng, klass, CLASS_MINIMUM_SIZE[klass] - 1)


# -- pendant-pair stripping (certificate side of the ear reduction) ----------


def test_strip_cascade_f_to_e_to_d():
    rng = random.Random(3)
    ob_f = random_obstruction(rng, "F", 11)
    ob_e, pair, anchors = strip_pendant_pair(ob_f)
    assert ob_e.klass == "E"
    assert set(pair) <= set(ob_f.nominated)
    assert set(anchors) <= set(ob_e.nominated)
    ob_d, _, _ = strip_pendant_pair(ob_e)
    assert ob_d.klass == "D"
    g = ob_d.plus.derived_graph()
    assert verify_obstruction(g, ob_d.nominated, ob_d)[0]


def test_strip_c_to_a():
    ob_c = build_minimum("C")
    ob_a, pair, anchors = strip_pendant_pair(ob_c)
    assert ob_a.klass == "A"
    g = ob_a.plus.derived_graph()
    assert verify_obstruction(g, ob_a.nominated, ob_a)[0]


def test_strip_b_to_quadrilateral_with_diagonal():
    ob_b = build_minimum("B")
    ob, pair, anchors = strip_pendant_pair(ob_b)
    assert ob.klass == "D"
    assert ob.base.n == 4 and ob.base.m == 5  # K4 minus one edge


# -- joining at a nominated cut pair ------------------------------------------


def test_join_two_c4_webs_along_outer_edge():
    web1 = build_class("D", core=Graph("aubv", [("a", "u"), ("u", "v"), ("v", "b"), ("b", "a")]),
                       outer=("a", "u", "v", "b"))
    web2 = build_class("D", core=Graph("cudv", [("c", "u"), ("u", "v"), ("v", "d"), ("d", "c")]),
                       outer=("c", "u", "v", "d"))
    joined_graph = Graph(
        "abcduv",
        [("a", "u"), ("u", "v"), ("v", "b"), ("b", "a"),
         ("c", "u"), ("v", "d"), ("d", "c")],
    )
    ob = join_at_cut_pair(web1, web2, "u", "v", graph=joined_graph, roots="abcd")
    assert ob.klass == "D"
    ok, why = verify_obstruction(joined_graph, tuple("abcd"), ob)
    assert ok, why
    assert oracle_rooted_minor(joined_graph, tuple("abcd")) is None


# -- completing cofacial instances into certificates --------------------------


def cofacial_certificate(g, roots):
    emb = planar_embed(g)
    face = next(f for f in emb.faces if set(roots) <= set(f))
    return cofacial_obstruction(g, emb.faces, face, roots)


def test_cofacial_cube_face():
    cube = Graph(range(8), [(a[0] + 2 * a[1] + 4 * a[2], b[0] + 2 * b[1] + 4 * b[2])
                            for a, b in nx.hypercube_graph(3).edges])
    emb = planar_embed(cube)
    face = emb.faces[0]
    roots = tuple(face)
    ob = cofacial_obstruction(cube, emb.faces, face, roots)
    assert ob is not None and ob.klass == "D"
    ok, why = verify_obstruction(cube, roots, ob)
    assert ok, why


def test_cofacial_separating_triangle_regression():
    # 3-connected planar graph whose completion must scoop vertex 0 out of
    # the separating triangle (2, 4, 6) into that triangle's clique
    g = Graph(
        range(7),
        [(0, 2), (0, 4), (0, 6), (1, 3), (1, 4), (1, 5), (1, 6),
         (2, 4), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)],
    )
    roots = (1, 2, 4, 5)
    ob = cofacial_certificate(g, roots)
    assert ob is not None
    ok, why = verify_obstruction(g, roots, ob)
    assert ok, why
    assert oracle_rooted_minor(g, roots) is None


def test_web_completion_on_plain_quad_face():
    # K4 minus an edge, roots on the outer quadrilateral
    g = Graph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")])
    emb = planar_embed(g)
    face = next(f for f in emb.faces if len(f) == 4)
    ob = web_completion(g, emb.faces, face, tuple(face))
    assert ob is not None
    assert verify_obstruction(g, tuple(face), ob)[0]


@given(st.integers(min_value=4, max_value=11), st.randoms(use_true_random=False))
@settings(max_examples=30, deadline=None)
def test_random_webs_certify_their_own_quad(size, pyrng):
    rng = random.Random(pyrng.randrange(1 << 30))
    core, outer = random_web(rng, size)
    ob = build_class("D", core=core, outer=outer)
    ok, why = verify_obstruction(core, outer, ob)
    assert ok, why
