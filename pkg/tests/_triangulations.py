"""Enumerators for small planar triangulations and 3-connected planar graphs.

Maximal planar graphs on a fixed vertex count are connected under diagonal
flips, so a breadth-first search over flips from one stacked triangulation
enumerates them all up to isomorphism.  Deleting edges while preserving
3-connectivity then reaches every 3-connected planar graph, since any
non-maximal one can be re-triangulated by adding face chords.
"""

from functools import lru_cache

import networkx as nx

from rootedk4 import Graph, is_k_connected, planar_embed

# Sphere triangulation counts by vertex count, used as enumerator self-checks.
TRIANGULATION_COUNTS = {4: 1, 5: 1, 6: 2, 7: 5, 8: 14, 9: 50}

# Combinatorial types of 3-polytopes (3-connected planar graphs).
POLYTOPE_COUNTS = {4: 1, 5: 2, 6: 7, 7: 34, 8: 257, 9: 2606}


def _stacked(n: int) -> Graph:
    edges = [(0, 1), (0, 2), (1, 2)]
    for v in range(3, n):
        edges += [(0, v), (1, v), (v - 1, v)]
    return Graph(range(n), edges)


def _flip_neighbours(g: Graph):
    emb = planar_embed(g)
    assert emb is not None
    sides: dict = {}
    for f in emb.faces:
        assert len(f) == 3
        for i in range(3):
            e = frozenset((f[i], f[(i + 1) % 3]))
            sides.setdefault(e, []).append(f[(i + 2) % 3])
    for e, opp in sorted(sides.items(), key=lambda kv: sorted(kv[0])):
        if len(opp) != 2:
            continue
        c, d = opp
        if c == d or g.has_edge(c, d):
            continue
        u, v = sorted(e)
        yield Graph(g.vertices, [x for x in g.edges if frozenset(x) != e] + [(c, d)])


class _IsoStore:
    """Set of graphs up to isomorphism, bucketed by a WL hash."""

    def __init__(self):
        self._buckets: dict = {}
        self.graphs: list = []

    def add(self, g: Graph) -> bool:
        nxg = g.to_networkx()
        key = (g.n, g.m, nx.weisfeiler_lehman_graph_hash(nxg))
        bucket = self._buckets.setdefault(key, [])
        for other in bucket:
            if nx.is_isomorphic(nxg, other):
                return False
        bucket.append(nxg)
        self.graphs.append(g)
        return True


@lru_cache(maxsize=None)
def triangulations(n: int) -> tuple:
    """All maximal planar graphs on n >= 4 vertices, up to isomorphism."""
    store = _IsoStore()
    start = _stacked(n)
    store.add(start)
    frontier = [start]
    while frontier:
        nxt = []
        for g in frontier:
            for h in _flip_neighbours(g):
                if store.add(h):
                    nxt.append(h)
        frontier = nxt
    assert len(store.graphs) == TRIANGULATION_COUNTS[n]
    return tuple(store.graphs)


@lru_cache(maxsize=None)
def three_connected_planar(n: int) -> tuple:
    """All 3-connected planar graphs on n >= 4 vertices, up to isomorphism."""
    store = _IsoStore()
    frontier = []
    for g in triangulations(n):
        if store.add(g):
            frontier.append(g)
    while frontier:
        nxt = []
        for g in frontier:
            for e in g.edges:
                h = Graph(g.vertices, [x for x in g.edges if x != e])
                if is_k_connected(h, 3) and store.add(h):
                    nxt.append(h)
        frontier = nxt
    assert len(store.graphs) == POLYTOPE_COUNTS[n]
    return tuple(store.graphs)
