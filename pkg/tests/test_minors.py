import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rootedk4 import (
    Graph,
    K3Certificate,
    MinorWitness,
    oracle_rooted_minor,
    rooted_k3,
    verify_k3_certificate,
    verify_witness,
)
from rootedk4.minors import ORACLE_MAX_ENV

from strategies import graphs

K4 = Graph(range(4), itertools.combinations(range(4), 2))
K23 = Graph("abcdv", [(x, y) for x in "abc" for y in "dv"])
OCTAHEDRON = Graph(range(6), nx.octahedral_graph().edges)

# C4 a-b-c-d-a plus two disjoint paths a-p-c and b-q-d
CROSSED_C4 = Graph(
    "abcdpq",
    [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"),
     ("a", "p"), ("p", "c"), ("b", "q"), ("q", "d")],
)


# -- verify_witness ----------------------------------------------------------


def test_singleton_witness_on_k4():
    w = MinorWitness({r: frozenset([r]) for r in range(4)})
    ok, why = verify_witness(K4, (0, 1, 2, 3), w)
    assert ok, why


def test_witness_rejects_overlap():
    w = MinorWitness({0: {0, 1}, 1: {1}, 2: {2}, 3: {3}})
    assert verify_witness(K4, (0, 1, 2, 3), w) == (False, "overlap")


def test_witness_on_crossed_c4():
    w = MinorWitness({
        "a": {"a", "p"}, "b": {"b", "q"}, "c": {"c"}, "d": {"d"},
    })
    ok, why = verify_witness(CROSSED_C4, "abcd", w)
    assert ok, why


def test_witness_rejects_disconnected_branch():
    # p is adjacent to a and c only, so {d, p} is not connected
    w = MinorWitness({"a": {"a"}, "b": {"b"}, "c": {"c"}, "d": {"d", "p"}})
    assert verify_witness(CROSSED_C4, "abcd", w) == (False, "disconnected-branch")


def test_witness_rejects_missing_adjacency():
    w = MinorWitness({r: frozenset([r]) for r in "abcd"})
    assert verify_witness(CROSSED_C4, "abcd", w) == (False, "missing-adjacency")


def test_witness_rejects_wrong_roots_and_unknown_vertices():
    w = MinorWitness({0: {0}, 1: {1}, 2: {2}})
    assert verify_witness(K4, (0, 1, 2, 3), w) == (False, "roots-mismatch")
    w = MinorWitness({0: {0, 9}, 1: {1}, 2: {2}, 3: {3}})
    assert verify_witness(K4, (0, 1, 2, 3), w) == (False, "unknown-vertex")
    w = MinorWitness({0: {1}, 1: {0}, 2: {2}, 3: {3}})
    assert verify_witness(K4, (0, 1, 2, 3), w) == (False, "root-not-in-branch")


# -- the oracle --------------------------------------------------------------


def test_oracle_k4():
    w = oracle_rooted_minor(K4, (0, 1, 2, 3))
    assert w is not None
    assert verify_witness(K4, (0, 1, 2, 3), w)[0]


def test_oracle_k23_absent():
    assert oracle_rooted_minor(K23, "abcd") is None


def test_oracle_octahedron_every_root_choice():
    for roots in itertools.combinations(range(6), 4):
        w = oracle_rooted_minor(OCTAHEDRON, roots)
        assert w is not None and verify_witness(OCTAHEDRON, roots, w)[0]


def test_oracle_triple_roots():
    w = oracle_rooted_minor(Graph("abc", [("a", "b"), ("b", "c"), ("a", "c")]), "abc")
    assert w is not None
    assert oracle_rooted_minor(Graph("abc", [("a", "b"), ("b", "c")]), "abc") is None


@given(graphs(max_n=7), st.data())
@settings(max_examples=60, deadline=None)
def test_oracle_witnesses_verify(g, data):
    roots = tuple(data.draw(st.permutations(g.vertices))[:4])
    w = oracle_rooted_minor(g, roots)
    if w is not None:
        ok, why = verify_witness(g, roots, w)
        assert ok, why


@given(graphs(max_n=7), st.data())
@settings(max_examples=40, deadline=None)
def test_oracle_monotone_under_edge_addition(g, data):
    roots = tuple(data.draw(st.permutations(g.vertices))[:4])
    had = oracle_rooted_minor(g, roots) is not None
    missing = [
        (u, v)
        for u, v in itertools.combinations(g.vertices, 2)
        if not g.has_edge(u, v)
    ]
    for _ in range(min(3, len(missing))):
        e = data.draw(st.sampled_from(missing))
        missing.remove(e)
        g = g.add_edges([e])
        has = oracle_rooted_minor(g, roots) is not None
        assert has or not had
        had = has


def test_oracle_size_guard(monkeypatch):
    big = Graph(range(12), [(i, (i + 1) % 12) for i in range(12)])
    with pytest.raises(ValueError):
        oracle_rooted_minor(big, (0, 3, 6, 9))
    # explicit override wins
    assert oracle_rooted_minor(big, (0, 3, 6, 9), max_vertices=12) is None
    # environment override too
    monkeypatch.setenv(ORACLE_MAX_ENV, "12")
    assert oracle_rooted_minor(big, (0, 3, 6, 9)) is None


# -- the rooted triangle dichotomy -------------------------------------------


def test_rooted_k3_triangle():
    g = Graph("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    out = rooted_k3(g, "a", "b", "c")
    assert isinstance(out, MinorWitness)
    assert verify_witness(g, "abc", out)[0]


def test_rooted_k3_star_apex_center():
    g = Graph("vabc", [("v", "a"), ("v", "b"), ("v", "c")])
    out = rooted_k3(g, "a", "b", "c")
    assert isinstance(out, K3Certificate)
    assert out.apex == "v"
    assert verify_k3_certificate(g, "abc", out)[0]


def test_rooted_k3_path_apex_is_a_root():
    g = Graph("abc", [("a", "b"), ("b", "c")])
    out = rooted_k3(g, "a", "b", "c")
    assert isinstance(out, K3Certificate)
    assert out.apex == "b"
    assert verify_k3_certificate(g, "abc", out)[0]


def test_rooted_k3_rejects_repeated_roots():
    with pytest.raises(ValueError):
        rooted_k3(K4, 0, 0, 1)


@given(graphs(min_n=3, max_n=7), st.data())
@settings(max_examples=80, deadline=None)
def test_rooted_k3_dichotomy_matches_oracle(g, data):
    x, y, z = data.draw(st.permutations(g.vertices))[:3]
    out = rooted_k3(g, x, y, z)
    oracle = oracle_rooted_minor(g, (x, y, z))
    if isinstance(out, MinorWitness):
        assert oracle is not None
        ok, why = verify_witness(g, (x, y, z), out)
        assert ok, why
    else:
        assert oracle is None
        ok, why = verify_k3_certificate(g, (x, y, z), out)
        assert ok, why
