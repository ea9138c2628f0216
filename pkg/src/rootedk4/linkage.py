"""Disjoint two-path linkages and their impossibility certificates.

Given four distinct terminals s1, t1, s2, t2 of a graph, a *linkage* is a
pair of vertex-disjoint paths, one from s1 to t1 and one from s2 to t2.
When no linkage exists the graph can be padded out (by adding edges that
keep it linkage-free) to a canonical maximal form: a web whose outer
quadrilateral reads s1, s2, t1, t2 -- so the two terminal pairs interleave
on the boundary -- with an optional clique attached inside each triangular
face.  Two disjoint paths joining opposite corners of the quadrilateral
would have to cross, and a clique hanging inside one triangle cannot carry
a path past the triangle's corners, so such a supergraph certifies that no
linkage exists in anything it spans.

:func:`find_linkage` returns one object or the other, and the two verify
functions check each against the instance without re-running the search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .graph_core import Graph, Vertex, svert, vkey
from .minors import MinorWitness
from .obstructions import PlusGraph, _cyclic_eq, verify_web

__all__ = [
    "Linkage",
    "WebCertificate",
    "verify_linkage",
    "verify_web_certificate",
    "find_linkage",
    "linkage_from_witness",
]


@dataclass(frozen=True)
class Linkage:
    """Two vertex-disjoint paths, ``path1`` from s1 to t1, ``path2`` from s2 to t2."""

    path1: tuple
    path2: tuple


@dataclass(frozen=True)
class WebCertificate:
    """A web-with-cliques supergraph witnessing that no linkage exists.

    ``plus.base`` is a web whose outer quadrilateral is ``outer``; the
    instance graph is a spanning subgraph of ``plus.derived_graph()``.
    ``outer`` lists the terminals in boundary order (s1, s2, t1, t2),
    i.e. with the two linkage pairs interleaved.
    """

    plus: PlusGraph
    outer: tuple


def _check_terminals(g: Graph, terminals: Sequence[Vertex]) -> Optional[str]:
    if len(terminals) != 4 or len(set(terminals)) != 4:
        return "terminals-not-four-distinct"
    for v in terminals:
        if not g.has_vertex(v):
            return "terminal-missing"
    return None


def _is_path_in(g: Graph, path: Sequence[Vertex]) -> bool:
    if len(path) != len(set(path)):
        return False
    return all(g.has_edge(path[i], path[i + 1]) for i in range(len(path) - 1))


def verify_linkage(g: Graph, terminals: Sequence[Vertex], lk: Linkage) -> tuple:
    """Check a linkage against instance ``(g, (s1, t1, s2, t2))``.

    Returns ``(ok, reason)``; ``reason`` is ``"ok"`` on success.
    """
    bad = _check_terminals(g, terminals)
    if bad:
        return False, bad
    s1, t1, s2, t2 = terminals
    p1, p2 = tuple(lk.path1), tuple(lk.path2)
    if not p1 or (p1[0], p1[-1]) != (s1, t1):
        return False, "linkage:path1-endpoints"
    if not p2 or (p2[0], p2[-1]) != (s2, t2):
        return False, "linkage:path2-endpoints"
    if not _is_path_in(g, p1):
        return False, "linkage:path1-not-a-path"
    if not _is_path_in(g, p2):
        return False, "linkage:path2-not-a-path"
    if set(p1) & set(p2):
        return False, "linkage:paths-intersect"
    return True, "ok"


def verify_web_certificate(
    g: Graph, terminals: Sequence[Vertex], cert: WebCertificate
) -> tuple:
    """Check a no-linkage certificate against instance ``(g, (s1, t1, s2, t2))``.

    The checks are purely structural: the padded graph must be a valid
    web-with-cliques whose outer quadrilateral interleaves the two
    terminal pairs, and ``g`` must be a spanning subgraph of it.
    """
    bad = _check_terminals(g, terminals)
    if bad:
        return False, bad
    s1, t1, s2, t2 = terminals
    ok, why = cert.plus.validate()
    if not ok:
        return False, why
    if not _cyclic_eq(cert.outer, (s1, s2, t1, t2)):
        return False, "web-cert:outer-not-interleaved"
    ok, why = verify_web(cert.plus.base, cert.outer)
    if not ok:
        return False, why
    derived = cert.plus.derived_graph()
    if derived.vertex_set() != g.vertex_set():
        return False, "web-cert:vertex-set"
    if not g.edge_set() <= derived.edge_set():
        return False, "web-cert:missing-edge"
    return True, "ok"


# -- search -----------------------------------------------------------------


def _bfs_path(g: Graph, src: Vertex, dst: Vertex, removed: set) -> Optional[tuple]:
    """Shortest src-dst path avoiding ``removed``, deterministic tie-break."""
    if src in removed or dst in removed:
        return None
    if src == dst:
        return (src,)
    parent: dict = {src: None}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w in removed or w in parent:
                    continue
                parent[w] = u
                if w == dst:
                    path = [w]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path))
                nxt.append(w)
        frontier = nxt
    return None


def _reachable(g: Graph, src: Vertex, removed: set) -> set:
    if src in removed:
        return set()
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if w not in removed and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _search_linkage(g: Graph, s1, t1, s2, t2) -> Optional[Linkage]:
    """Exhaustive search for a linkage, or None.

    Enumerates simple s1-t1 paths avoiding {s2, t2} (the other path owns
    its endpoints, so this loses nothing) in sorted-neighbour order, and
    takes the first whose removal leaves s2 and t2 connected.  Two prunes
    keep dead branches short: the partial path must still reach t1, and
    must not already separate s2 from t2.
    """
    banned = {s2, t2}
    path = [s1]
    on_path = {s1}

    def extend() -> Optional[Linkage]:
        cur = path[-1]
        if cur == t1:
            rest = _bfs_path(g, s2, t2, on_path)
            if rest is not None:
                return Linkage(tuple(path), rest)
            return None
        for w in g.neighbors(cur):
            if w in banned or w in on_path:
                continue
            blocked = (on_path | banned) - {w}
            if t1 not in _reachable(g, w, blocked):
                continue
            if t2 not in _reachable(g, s2, on_path | {w}):
                continue
            path.append(w)
            on_path.add(w)
            found = extend()
            if found is not None:
                return found
            path.pop()
            on_path.discard(w)
        return None

    return extend()


# -- saturation -------------------------------------------------------------


def _saturate(g: Graph, s1, t1, s2, t2, reverse: bool) -> Graph:
    """Add every edge that keeps the graph linkage-free.

    Linkages are monotone under adding edges, so a single pass over the
    non-edges (in canonical order, or reversed as a fallback) reaches a
    maximal linkage-free supergraph.
    """
    verts = g.vertices
    gaps = [
        (u, v)
        for i, u in enumerate(verts)
        for v in verts[i + 1 :]
        if not g.has_edge(u, v)
    ]
    if reverse:
        gaps.reverse()
    cur = g
    for u, v in gaps:
        trial = cur.add_edges([(u, v)])
        if _search_linkage(trial, s1, t1, s2, t2) is None:
            cur = trial
    return cur


def _strip_cliques(full: Graph, terminals: set) -> Optional[tuple]:
    """Split a maximal linkage-free graph into (web base, clique map).

    Repeatedly removes a non-terminal vertex whose neighbourhood is a
    clique.  Webs have no such vertex (a triangle neighbourhood would be a
    non-face triangle, and larger link cycles contain non-adjacent pairs),
    so the fixpoint is exactly the web base and the removals are exactly
    the attached-clique members, keyed by their base-side neighbours.
    """
    adj = {v: set(full.neighbors(v)) for v in full.vertices}
    removed: list = []
    while True:
        pick = None
        for v in svert(adj):
            if v in terminals:
                continue
            nbrs = adj[v]
            if all(
                b in adj[a]
                for a in nbrs
                for b in nbrs
                if vkey(a) < vkey(b)
            ):
                pick = v
                break
        if pick is None:
            break
        removed.append((pick, frozenset(adj[pick])))
        for w in adj[pick]:
            adj[w].discard(pick)
        del adj[pick]
    base = Graph(adj, [(u, w) for u in adj for w in adj[u] if vkey(u) < vkey(w)])
    cliques: dict = {}
    surviving = base.vertex_set()
    for v, nbrs in removed:
        key = nbrs & surviving
        if len(key) != 3:
            return None
        cliques.setdefault(key, set()).add(v)
    return base, {t: frozenset(x) for t, x in cliques.items()}


def find_linkage(g: Graph, terminals: Sequence[Vertex]):
    """Find a :class:`Linkage` or a :class:`WebCertificate` for its absence.

    ``terminals`` is ``(s1, t1, s2, t2)``: the sought paths join s1 to t1
    and s2 to t2.  Exactly one kind of answer exists for every instance;
    both kinds are verified before being returned.
    """
    bad = _check_terminals(g, terminals)
    if bad:
        raise ValueError(bad)
    s1, t1, s2, t2 = terminals
    lk = _search_linkage(g, s1, t1, s2, t2)
    if lk is not None:
        ok, why = verify_linkage(g, terminals, lk)
        if not ok:
            raise AssertionError(f"internal error: bad linkage from search: {why}")
        return lk
    for reverse in (False, True):
        full = _saturate(g, s1, t1, s2, t2, reverse)
        parts = _strip_cliques(full, {s1, t1, s2, t2})
        if parts is None:
            continue
        base, cliques = parts
        cert = WebCertificate(PlusGraph(base, cliques), (s1, s2, t1, t2))
        ok, _ = verify_web_certificate(g, terminals, cert)
        if ok:
            return cert
    raise AssertionError("internal error: linkage-free graph did not saturate to a web")


def linkage_from_witness(g: Graph, roots: Sequence[Vertex], witness: MinorWitness) -> Linkage:
    """Extract a linkage from a rooted clique-minor witness.

    With roots (a, b, c, d), routes one path from a to c inside the a- and
    c-branch sets via the edge joining them, and one from b to d likewise;
    branch sets are disjoint, so the paths are.  Terminal order of the
    result is ``(a, c, b, d)``.
    """
    a, b, c, d = roots

    def route(x, y) -> tuple:
        bx = witness.branch_sets[x]
        by = witness.branch_sets[y]
        link = min(
            (
                (u, v)
                for u in bx
                for v in by
                if g.has_edge(u, v)
            ),
            key=lambda e: (vkey(e[0]), vkey(e[1])),
        )
        u, v = link
        gx = g.induced(bx)
        gy = g.induced(by)
        first = _bfs_path(gx, x, u, set())
        second = _bfs_path(gy, v, y, set())
        if first is None or second is None:
            raise AssertionError("internal error: branch set not connected")
        return first + second

    lk = Linkage(route(a, c), route(b, d))
    ok, why = verify_linkage(g, (a, c, b, d), lk)
    if not ok:
        raise AssertionError(f"internal error: witness did not yield a linkage: {why}")
    return lk
