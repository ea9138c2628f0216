"""Rooted-minor witnesses, the brute-force oracle, and the rooted-triangle
dichotomy.

The oracle (:func:`oracle_rooted_minor`) is an independent exhaustive
search over branch-set assignments, intended as ground truth for
desk-scale verification.  It deliberately shares no machinery with the
decision procedure beyond the :class:`~rootedk4.graph_core.Graph` type and
the witness verifier.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import networkx as nx

from .graph_core import Graph, svert, vkey

ORACLE_MAX_ENV = "ROOTEDK4_ORACLE_MAX"
_DEFAULT_ORACLE_MAX = 10


@dataclass(frozen=True)
class MinorWitness:
    """Branch sets of a rooted clique minor, keyed by root.

    Maps each root to the frozenset of vertices of its branch set.  Valid
    witnesses have pairwise-disjoint connected branch sets, each
    containing its root, with an edge between every pair.  Branch sets
    need not cover the graph.
    """

    branch_sets: Mapping

    def roots(self) -> tuple:
        return svert(self.branch_sets)

    def __eq__(self, other):
        if not isinstance(other, MinorWitness):
            return NotImplemented
        return dict(self.branch_sets) == dict(other.branch_sets)


@dataclass(frozen=True)
class K3Certificate:
    """Apex certificate for the absence of a rooted triangle minor.

    Removing `apex` leaves at most one of the three nominated vertices in
    each component (the apex itself may be one of the nominated vertices).
    """

    apex: object


def verify_witness(g: Graph, roots, witness: MinorWitness) -> tuple:
    """Check a rooted-minor witness. Returns (ok, reason).

    Reasons: "roots-mismatch", "unknown-vertex", "root-not-in-branch",
    "overlap", "disconnected-branch", "missing-adjacency", "ok".
    """
    roots = tuple(roots)
    if len(roots) not in (3, 4) or len(set(roots)) != len(roots):
        return False, "roots-mismatch"
    if set(witness.branch_sets) != set(roots):
        return False, "roots-mismatch"
    sets = {r: frozenset(witness.branch_sets[r]) for r in roots}
    for r in roots:
        for v in sets[r]:
            if not g.has_vertex(v):
                return False, "unknown-vertex"
        if r not in sets[r]:
            return False, "root-not-in-branch"
    for i, r in enumerate(roots):
        for s in roots[i + 1 :]:
            if sets[r] & sets[s]:
                return False, "overlap"
    for r in roots:
        if not g.connected_in(sets[r]):
            return False, "disconnected-branch"
    for i, r in enumerate(roots):
        for s in roots[i + 1 :]:
            if not any(g.has_edge(x, y) for x in sets[r] for y in sets[s]):
                return False, "missing-adjacency"
    return True, "ok"


def _oracle_limit(max_vertices: Optional[int]) -> int:
    if max_vertices is not None:
        return max_vertices
    env = os.environ.get(ORACLE_MAX_ENV)
    if env:
        return int(env)
    return _DEFAULT_ORACLE_MAX


def oracle_rooted_minor(
    g: Graph, roots, *, max_vertices: Optional[int] = None
) -> Optional[MinorWitness]:
    """Exhaustively search for a clique minor rooted at 3 or 4 vertices.

    Returns a verified witness or None.  Refuses graphs larger than the
    guard (default 10 vertices; override with the ROOTEDK4_ORACLE_MAX
    environment variable or the max_vertices argument) since the search
    is exponential by design.
    """
    roots = tuple(roots)
    k = len(roots)
    if k not in (3, 4) or len(set(roots)) != k:
        raise ValueError(f"need 3 or 4 distinct roots, got {roots!r}")
    for r in roots:
        if not g.has_vertex(r):
            raise ValueError(f"root {r!r} not in graph")
    limit = _oracle_limit(max_vertices)
    if g.n > limit:
        raise ValueError(
            f"oracle refused: {g.n} vertices exceeds guard {limit} "
            f"(set {ORACLE_MAX_ENV} to override)"
        )

    # Order non-root vertices by BFS distance from the roots so that
    # assignments that can never reconnect die early.
    order = list(roots)
    seen = set(roots)
    frontier = list(roots)
    while frontier:
        nxt = []
        for x in frontier:
            for y in g.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = svert(set(nxt))
        order.extend(frontier)
    for v in g.vertices:  # vertices unreachable from any root
        if v not in seen:
            order.append(v)

    unused = -1
    assign = {v: unused for v in g.vertices}
    for i, r in enumerate(roots):
        assign[r] = i

    pair_need = [(i, j) for i in range(k) for j in range(i + 1, k)]

    def feasible(upto: int) -> bool:
        pool = set(order[upto:])
        branches = [set() for _ in range(k)]
        for v in order[:upto]:
            if assign[v] != unused:
                branches[assign[v]].add(v)
        # Each partial branch must still be connectable through the pool.
        for i in range(k):
            allowed = branches[i] | pool
            comp = _closure(g, {roots[i]}, allowed)
            if not branches[i] <= comp:
                return False
        # Each missing adjacency must still be realisable.
        for i, j in pair_need:
            found = False
            ai = branches[i] | pool
            aj = branches[j] | pool
            for x, y in g.edges:
                if (x in ai and y in aj) or (y in ai and x in aj):
                    found = True
                    break
            if not found:
                return False
        return True

    result: list = []

    def search(idx: int) -> bool:
        if idx == len(order):
            sets = {roots[i]: frozenset(v for v in g.vertices if assign[v] == i) for i in range(k)}
            w = MinorWitness(branch_sets=sets)
            ok, _ = verify_witness(g, roots, w)
            if ok:
                result.append(w)
                return True
            return False
        v = order[idx]
        if idx < k:  # roots are pre-assigned
            return feasible(idx + 1) and search(idx + 1)
        for lab in list(range(k)) + [unused]:
            assign[v] = lab
            if feasible(idx + 1) and search(idx + 1):
                return True
        assign[v] = unused
        return False

    if search(0):
        return result[0]
    return None


def _closure(g: Graph, seed: set, allowed: set) -> set:
    """Vertices reachable from `seed` while staying inside `allowed`."""
    comp = set(seed) & allowed
    stack = list(comp)
    while stack:
        x = stack.pop()
        for y in g.neighbors(x):
            if y in allowed and y not in comp:
                comp.add(y)
                stack.append(y)
    return comp


def verify_k3_certificate(g: Graph, roots3, cert: K3Certificate) -> tuple:
    """Check an apex certificate. Returns (ok, reason)."""
    roots3 = tuple(roots3)
    if len(roots3) != 3 or len(set(roots3)) != 3:
        return False, "roots-mismatch"
    if not g.has_vertex(cert.apex):
        return False, "unknown-vertex"
    rest = g.remove_vertices([cert.apex])
    live = [r for r in roots3 if r != cert.apex]
    for comp in rest.components():
        if len(comp & set(live)) > 1:
            return False, "roots-together"
    return True, "ok"


def rooted_k3(g: Graph, x, y, z) -> Union[MinorWitness, K3Certificate]:
    """Dichotomy for triangle minors rooted at x, y, z.

    Returns either a MinorWitness with branch sets keyed by x, y, z or a
    K3Certificate naming an apex whose removal strands the roots in
    distinct components.  Every connected graph admits exactly one of the
    two outcomes (an apex refutes all witnesses; no apex forces one).
    Disconnected inputs are accepted only when an apex exists.
    """
    roots = (x, y, z)
    if len(set(roots)) != 3:
        raise ValueError("roots must be distinct")
    for r in roots:
        if not g.has_vertex(r):
            raise ValueError(f"root {r!r} not in graph")

    for v in g.vertices:
        cert = K3Certificate(apex=v)
        ok, _ = verify_k3_certificate(g, roots, cert)
        if ok:
            return cert

    w = _recover_k3(g, roots)
    ok, reason = verify_witness(g, roots, w)
    if not ok:
        raise AssertionError(f"internal error: triangle recovery produced {reason}")
    return w


def _recover_k3(g: Graph, roots: tuple) -> MinorWitness:
    """Construct a rooted-triangle witness when no apex exists.

    Works in the block forest: locate the unique block where the three
    root-access paths meet, take a cycle through two of the entry
    vertices, route the third entry to that cycle, and split the cycle
    into arcs.
    """
    x, y, z = roots

    comp_of = {}
    for comp in g.components():
        for v in comp:
            comp_of[v] = comp
    if not (comp_of[x] == comp_of[y] == comp_of[z]):
        raise ValueError(
            "roots in distinct components with no apex: outside the dichotomy"
        )
    gsub = g.induced(comp_of[x])
    gn = gsub.to_networkx()

    blocks = [frozenset(b) for b in nx.biconnected_components(gn)]
    cuts = set(nx.articulation_points(gn))

    # Block-cut tree: nodes are blocks plus cut vertices.
    bct = nx.Graph()
    for b in blocks:
        bct.add_node(("B", b))
        for v in b:
            if v in cuts:
                bct.add_edge(("B", b), ("C", v))

    def locate(r):
        if r in cuts:
            return ("C", r)
        for b in blocks:
            if r in b:
                return ("B", b)
        raise AssertionError("internal error: root outside all blocks")

    nodes = [locate(r) for r in roots]
    pxy = nx.shortest_path(bct, nodes[0], nodes[1])
    pxz = nx.shortest_path(bct, nodes[0], nodes[2])
    pyz = nx.shortest_path(bct, nodes[1], nodes[2])
    common = set(pxy) & set(pxz) & set(pyz)
    if len(common) != 1:
        raise AssertionError("internal error: tree median not unique")
    median = common.pop()
    if median[0] == "C":
        raise AssertionError("internal error: median cut vertex is an apex")
    block = median[1]

    def entry_and_path(r):
        """Entry vertex of `r` into the median block and an access path.

        BFS from r; the first block vertex reached is the unique entry,
        and the BFS tree path to it avoids the rest of the block.
        """
        if r in block:
            return r, (r,)
        parent = {r: None}
        frontier = [r]
        while frontier:
            nxt = []
            for u in frontier:
                for w in gsub.neighbors(u):
                    if w in parent:
                        continue
                    parent[w] = u
                    if w in block:
                        path = [w]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        return w, tuple(reversed(path))
                    nxt.append(w)
            frontier = nxt
        raise AssertionError("internal error: no access path into median block")

    ex, px = entry_and_path(x)
    ey, py = entry_and_path(y)
    ez, pz = entry_and_path(z)
    if len({ex, ey, ez}) != 3:
        raise AssertionError("internal error: coincident entry vertices")

    core = gsub.induced(block)
    cyc = _cycle_through_two(core, ex, ey)
    if ez in cyc:
        arcs = _three_arcs(cyc, ex, ey, ez)
        parts = {x: set(arcs[0]), y: set(arcs[1]), z: set(arcs[2])}
    else:
        parts = _attach_third(core, cyc, ex, ey, ez)
        parts = {x: parts[0], y: parts[1], z: parts[2]}
    parts[x] |= set(px)
    parts[y] |= set(py)
    parts[z] |= set(pz)
    return MinorWitness(branch_sets={r: frozenset(parts[r]) for r in roots})


def _cycle_through_two(core: Graph, s, t) -> tuple:
    """A cycle through s and t in a 2-connected graph."""
    aux = core.to_networkx()
    paths = list(nx.node_disjoint_paths(aux, s, t))
    if len(paths) < 2:
        raise AssertionError("internal error: median block not 2-connected")
    paths.sort(key=lambda p: tuple(map(vkey, p)))
    p1, p2 = paths[0], paths[1]
    return tuple(p1) + tuple(reversed(p2[1:-1]))


def _three_arcs(cyc: tuple, ex, ey, ez) -> tuple:
    """Split a cycle at three of its vertices into arcs [e, next e)."""
    k = len(cyc)
    pos = {v: i for i, v in enumerate(cyc)}
    marks = sorted((pos[ex], pos[ey], pos[ez]))
    arcs_by_pos = {}
    for idx, start in enumerate(marks):
        end = marks[(idx + 1) % 3]
        arc = []
        i = start
        while i != end:
            arc.append(cyc[i])
            i = (i + 1) % k
        arcs_by_pos[cyc[start]] = arc
    return (arcs_by_pos[ex], arcs_by_pos[ey], arcs_by_pos[ez])


def _attach_third(core: Graph, cyc: tuple, ex, ey, ez) -> tuple:
    """Branch sets when the third entry lies off the cycle.

    Route two disjoint paths from ez to the cycle, then cut the cycle into
    two arcs, one holding ex and one fan foot, the other holding ey and
    the other foot.  The arc split is found by scanning cut positions and
    verified by the caller.
    """
    aux = core.to_networkx()
    sink = "~sink"
    while aux.has_node(sink):
        sink = "~" + sink
    for cvert in cyc:
        aux.add_edge(cvert, sink)
    raw = list(nx.node_disjoint_paths(aux, ez, sink))
    trimmed = []
    cset = set(cyc)
    for p in raw:
        t = []
        for v in p:
            t.append(v)
            if v in cset:
                break
        trimmed.append(tuple(t))
    trimmed.sort(key=lambda p: vkey(p[-1]))
    if len(trimmed) < 2:
        raise AssertionError("internal error: no fan from third entry")
    f1, f2 = None, None
    for i in range(len(trimmed)):
        for j in range(i + 1, len(trimmed)):
            if trimmed[i][-1] != trimmed[j][-1]:
                f1, f2 = trimmed[i], trimmed[j]
                break
        if f1:
            break
    if f1 is None:
        raise AssertionError("internal error: fan feet coincide")
    zset = set(f1[:-1]) | set(f2[:-1])
    p, q = f1[-1], f2[-1]

    k = len(cyc)
    for cut1 in range(k):
        for cut2 in range(k):
            if cut1 == cut2:
                continue
            arc1, arc2 = [], []
            i = cut1
            while i != cut2:
                arc1.append(cyc[i])
                i = (i + 1) % k
            i = cut2
            while i != cut1:
                arc2.append(cyc[i])
                i = (i + 1) % k
            for xa, ya in ((arc1, arc2), (arc2, arc1)):
                sx, sy = set(xa), set(ya)
                if ex in sx and ey in sy:
                    if (p in sx and q in sy) or (q in sx and p in sy):
                        return (sx, sy, zset | {ez})
    raise AssertionError("internal error: no valid arc split")
