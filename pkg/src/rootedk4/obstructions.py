"""Obstruction certificates for the rooted-K4-minor decision problem.

A NO answer is justified by exhibiting the input as a spanning subgraph of
an *obstruction*: a small structured graph H together with cliques X_T
attached to triangles T of H (the "plus" construction), drawn from six
classes named A-F.  Classes D, E and F are built around *webs*: planar
graphs with a quadrilateral outer face whose internal faces are all
triangles and whose triangles are all faces.

The module provides:

* the ``PlusGraph`` / ``Obstruction`` value types and their verifiers,
* the web predicate (:func:`verify_web`) and canonical web embeddings,
* class constructors (:func:`build_class`) and the certificate surgeries
  used by the decision procedure (clique absorption, pendant replacement,
  outer-face insertion, cut-pair joins, web completion),
* seeded random generators for webs and whole obstructions (the atlas).

Everything here is pure and deterministic: iteration orders are fixed by
sorting vertices with :func:`rootedk4.graph_core.vkey`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence

from .graph_core import (
    Graph,
    PlanarEmbedding,
    Vertex,
    _faces_from_rotation,
    canonical_cycle,
    fresh_vertices,
    skey,
    svert,
    vkey,
)

CLASS_NAMES = ("A", "B", "C", "D", "E", "F")

#: Classes whose certificates carry a planar web core and an embedding.
WEB_CLASSES = ("D", "E", "F")


def triangles_of(g: Graph) -> tuple[frozenset, ...]:
    """Return every triangle of ``g`` as a frozenset, deterministically ordered."""
    out = []
    for u in g.vertices:
        for v in g.neighbors(u):
            if vkey(v) <= vkey(u):
                continue
            for w in g.neighbors(v):
                if vkey(w) <= vkey(v):
                    continue
                if g.has_edge(u, w):
                    out.append(frozenset((u, v, w)))
    return tuple(sorted(out, key=skey))


def _sorted_tris(cliques: Mapping[frozenset, frozenset]):
    return sorted(cliques, key=skey)


@dataclass(frozen=True, eq=False)
class PlusGraph:
    """A base graph H plus, for each triangle T, a clique X_T joined to T.

    ``cliques`` maps triangles of ``base`` (frozensets of three vertices) to
    disjoint vertex sets living outside ``base``.  Empty clique entries are
    dropped on construction, so two PlusGraphs describing the same derived
    graph compare equal.
    """

    base: Graph
    cliques: Mapping[frozenset, frozenset] = field(default_factory=dict)

    def __post_init__(self) -> None:
        norm = {
            frozenset(t): frozenset(x)
            for t, x in self.cliques.items()
            if x
        }
        object.__setattr__(self, "cliques", norm)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PlusGraph):
            return NotImplemented
        return self.base == other.base and self.cliques == other.cliques

    def vertices(self) -> frozenset:
        out = set(self.base.vertex_set())
        for x in self.cliques.values():
            out |= x
        return frozenset(out)

    def region(self, t: frozenset) -> frozenset:
        """The clique region T union X_T."""
        t = frozenset(t)
        return t | self.cliques.get(t, frozenset())

    def clique_of(self, x: Vertex) -> Optional[frozenset]:
        """The triangle whose attached clique contains ``x``, if any."""
        for t in _sorted_tris(self.cliques):
            if x in self.cliques[t]:
                return t
        return None

    def validate(self) -> tuple[bool, str]:
        tris = set(triangles_of(self.base))
        base_verts = self.base.vertex_set()
        seen: set = set()
        for t in _sorted_tris(self.cliques):
            if t not in tris:
                return False, "plus:clique-key-not-a-triangle"
            x = self.cliques[t]
            if x & base_verts:
                return False, "plus:clique-overlaps-base"
            if x & seen:
                return False, "plus:cliques-overlap"
            seen |= x
        return True, "ok"

    def derived_graph(self) -> Graph:
        """H plus all clique regions turned into cliques joined to their T."""
        verts = list(self.base.vertices)
        edges = list(self.base.edges)
        for t in _sorted_tris(self.cliques):
            members = sorted(self.cliques[t], key=vkey)
            verts.extend(members)
            anchors = sorted(t, key=vkey)
            for i, x in enumerate(members):
                for a in anchors:
                    edges.append((x, a))
                for y in members[i + 1:]:
                    edges.append((x, y))
        return Graph(verts, edges)

    def with_clique(self, t, extra) -> "PlusGraph":
        t = frozenset(t)
        merged = dict(self.cliques)
        merged[t] = merged.get(t, frozenset()) | frozenset(extra)
        return PlusGraph(self.base, merged)


class VertexType(Enum):
    """The three kinds of nominated vertex an obstruction can carry."""

    TYPE1 = 1
    TYPE2 = 2
    TYPE3 = 3


@dataclass(frozen=True, eq=False)
class Obstruction:
    """A certificate that a graph has no rooted K4-minor.

    ``anchors`` names the class-specific skeleton: the edge (p, q) for
    classes A and B, the triangle (u, v, w) for class C, and the outer
    quadrilateral of the web core for classes D, E, F.  ``embedding`` is the
    canonical embedding of the web core (classes D/E/F) and None otherwise.
    """

    klass: str
    plus: PlusGraph
    nominated: tuple
    anchors: tuple
    embedding: Optional[PlanarEmbedding] = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Obstruction):
            return NotImplemented
        return (
            self.klass == other.klass
            and self.plus == other.plus
            and set(self.nominated) == set(other.nominated)
            and self.anchors == other.anchors
        )

    @property
    def base(self) -> Graph:
        return self.plus.base

    def core(self) -> tuple[Graph, tuple]:
        """The web core and its outer quadrilateral (classes D, E, F)."""
        if self.klass not in WEB_CLASSES:
            raise ValueError("core() is defined for classes D, E, F only")
        return _core_graph(self.klass, self.base, self.nominated), self.anchors


def _core_graph(klass: str, base: Graph, nominated: Sequence[Vertex]) -> Graph:
    """The web core: the base minus its nominated pendants (classes E, F)."""
    if klass == "D":
        return base
    nom = set(nominated)
    if klass == "E":
        # class-E pendants are the nominated vertices with no nominated neighbour
        pend = {v for v in nom if not _adjacent_to_nominated(base, v, nom)}
        return base.induced([v for v in base.vertices if v not in pend])
    if klass == "F":
        return base.induced([v for v in base.vertices if v not in nom])
    raise ValueError(klass)


def _adjacent_to_nominated(base: Graph, v: Vertex, nom: set) -> bool:
    return any(base.has_edge(v, y) for y in nom if y != v)


def _cyclic_variants(cycle: Sequence) -> list[tuple]:
    cyc = tuple(cycle)
    n = len(cyc)
    rots = [tuple(cyc[(i + k) % n] for k in range(n)) for i in range(n)]
    rev = tuple(reversed(cyc))
    rots += [tuple(rev[(i + k) % n] for k in range(n)) for i in range(n)]
    return rots


def _cyclic_eq(a: Sequence, b: Sequence) -> bool:
    return tuple(b) in _cyclic_variants(a)


def _orient_quad(cycle: Sequence, u: Vertex, v: Vertex) -> tuple:
    """Rotate/reflect a 4-cycle so it reads (u, v, ., .)."""
    cyc = tuple(cycle)
    if u not in cyc or v not in cyc:
        raise ValueError("orient: vertices not on the cycle")
    i = cyc.index(u)
    fwd = tuple(cyc[(i + k) % 4] for k in range(4))
    if fwd[1] == v:
        return fwd
    back = tuple(cyc[(i - k) % 4] for k in range(4))
    if back[1] == v:
        return back
    raise ValueError("orient: vertices not consecutive on the cycle")


def _canon_anchor_quad(klass: str, cycle: Sequence, nominated: Sequence) -> tuple:
    """Canonical orientation for a web-class anchor quadrilateral."""
    cyc = tuple(cycle)
    variants = _cyclic_variants(cyc)
    if klass == "D":
        pool = variants
    elif klass == "E":
        nom = set(nominated)
        pool = [w for w in variants if w[0] in nom and w[1] in nom]
    else:  # class F keeps its two anchor pairs in positions (0,1) and (2,3)
        pool = [
            w
            for w in variants
            if {w[0], w[1]} == {cyc[0], cyc[1]} or {w[0], w[1]} == {cyc[2], cyc[3]}
        ]
    return min(pool, key=lambda w: tuple(vkey(x) for x in w))


# ---------------------------------------------------------------------------
# The web predicate and canonical web embeddings.
# ---------------------------------------------------------------------------


def verify_web(core: Graph, outer: Sequence[Vertex]) -> tuple[bool, str]:
    """Check that ``core`` is a web with outer quadrilateral ``outer``.

    The face set of a web is determined combinatorially: it must consist of
    every triangle of the graph plus the outer quadrilateral (the bare
    4-cycle contributes the quadrilateral twice).  The predicate checks that
    this candidate face set closes up into a sphere: every edge on exactly
    two faces, Euler's formula, and a single face-cycle around every vertex.
    """
    outer = tuple(outer)
    if len(outer) != 4 or len(set(outer)) != 4:
        return False, "web:outer-not-a-quad"
    for x in outer:
        if not core.has_vertex(x):
            return False, "web:outer-vertex-missing"
    quad_edges = {frozenset((outer[i], outer[(i + 1) % 4])) for i in range(4)}
    for e in quad_edges:
        u, v = tuple(e)
        if not core.has_edge(u, v):
            return False, "web:outer-cycle-edge-missing"
    if not core.is_connected():
        return False, "web:disconnected"
    tris = triangles_of(core)
    if not tris:
        if core.n == 4 and core.m == 4:
            return True, "ok"  # the bare quadrilateral: two quad faces
        return False, "web:untriangulated"
    if core.n - core.m + len(tris) + 1 != 2:
        return False, "web:euler"
    for u, v in core.edges:
        e = frozenset((u, v))
        cover = sum(1 for t in tris if e <= t) + (1 if e in quad_edges else 0)
        if cover != 2:
            return False, "web:edge-face-cover"
    for v in core.vertices:
        link: list[tuple] = []
        for t in tris:
            if v in t:
                a, b = sorted(t - {v}, key=vkey)
                link.append((a, b))
        if v in outer:
            i = outer.index(v)
            a, b = sorted((outer[i - 1], outer[(i + 1) % 4]), key=vkey)
            link.append((a, b))
        nbrs = core.neighbors(v)
        if len(link) != len(nbrs):
            return False, "web:umbrella"
        deg: dict = {}
        adj: dict = {}
        for a, b in link:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        if set(deg) != set(nbrs) or any(d != 2 for d in deg.values()):
            return False, "web:umbrella"
        # all link degrees are 2; a connected 2-regular multigraph is a cycle
        seen = {nbrs[0]}
        stack = [nbrs[0]]
        while stack:
            x = stack.pop()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != set(nbrs):
            return False, "web:umbrella-split"
    return True, "ok"


def derive_web_embedding(core: Graph, outer: Sequence[Vertex]) -> PlanarEmbedding:
    """The canonical embedding of a verified web.

    A web's embedding is determined by its face set (all triangles plus the
    outer quadrilateral); orientations are propagated across shared edges
    starting from the outer face, and the resulting rotation system is
    validated before returning.
    """
    outer = tuple(outer)
    ok, why = verify_web(core, outer)
    if not ok:
        raise ValueError(f"not a web: {why}")
    def _face_key(f):
        return tuple(map(vkey, f))

    tris = triangles_of(core)
    if not tris:  # the bare quadrilateral
        rotation = {
            outer[i]: tuple(sorted((outer[i - 1], outer[(i + 1) % 4]), key=vkey))
            for i in range(4)
        }
        faces = tuple(sorted(_faces_from_rotation(rotation), key=_face_key))
        outer_face = next(f for f in faces if _cyclic_eq(f, outer))
        emb = PlanarEmbedding(rotation, faces, outer_face)
        ok, why = emb.validate(core)
        if not ok:
            raise AssertionError(f"internal error: quad embedding invalid ({why})")
        return emb

    walks: list[tuple] = [tuple(sorted(t, key=vkey)) for t in tris]
    walks.append(outer)
    quad_idx = len(walks) - 1
    edge_faces: dict[frozenset, list[int]] = {}
    for idx, w in enumerate(walks):
        for i in range(len(w)):
            edge_faces.setdefault(frozenset((w[i], w[(i + 1) % len(w)])), []).append(idx)
    oriented: dict[int, tuple] = {quad_idx: outer}
    stack = [quad_idx]
    while stack:
        idx = stack.pop()
        w = oriented[idx]
        for i in range(len(w)):
            x, y = w[i], w[(i + 1) % len(w)]
            for jdx in edge_faces[frozenset((x, y))]:
                if jdx in oriented or jdx == idx:
                    continue
                t = set(walks[jdx])
                z = (t - {x, y}).pop()
                oriented[jdx] = (y, x, z)
                stack.append(jdx)
    if len(oriented) != len(walks):
        raise AssertionError("internal error: face orientation did not propagate")

    succ: dict[Vertex, dict[Vertex, Vertex]] = {v: {} for v in core.vertices}
    for w in oriented.values():
        n = len(w)
        for i in range(n):
            u, v, x = w[i - 1], w[i], w[(i + 1) % n]
            succ[v][u] = x

    def rotation_from(maps, invert: bool):
        rot = {}
        for v in core.vertices:
            m = maps[v]
            if invert:
                m = {w: u for u, w in m.items()}
            start = min(m, key=vkey)
            chain = [start]
            cur = m[start]
            while cur != start:
                chain.append(cur)
                cur = m[cur]
            rot[v] = tuple(chain)
        return rot

    for invert in (True, False):
        rotation = rotation_from(succ, invert)
        faces = tuple(sorted(_faces_from_rotation(rotation), key=_face_key))
        outer_face = next(
            (f for f in faces if len(f) == 4 and set(f) == set(outer)), None
        )
        if outer_face is None:
            continue
        emb = PlanarEmbedding(rotation, faces, outer_face)
        ok, _ = emb.validate(core)
        if ok and _cyclic_eq(outer_face, outer):
            return emb
    raise AssertionError("internal error: could not realize web embedding")


# ---------------------------------------------------------------------------
# Class predicates, verification, and construction.
# ---------------------------------------------------------------------------


def _pendant_edges(base: Graph, pend, anchors) -> set:
    out = set()
    for x in pend:
        for a in anchors:
            out.add(frozenset((x, a)))
    return out


def _shape_check(ob: Obstruction) -> tuple[bool, str]:
    if ob.klass not in CLASS_NAMES:
        return False, "class:unknown"
    ok, why = ob.plus.validate()
    if not ok:
        return False, why
    base = ob.base
    nom = tuple(ob.nominated)
    if len(nom) != 4 or len(set(nom)) != 4:
        return False, "nominated:not-four-distinct"
    if not all(base.has_vertex(x) for x in nom):
        return False, "nominated:outside-base"
    nomset = set(nom)
    anchors = tuple(ob.anchors)

    if ob.klass in ("A", "B"):
        if ob.embedding is not None:
            return False, "embedding:unexpected"
        if len(anchors) != 2 or len(set(anchors)) != 2:
            return False, "anchors:not-an-edge"
        p, q = anchors
        if not (base.has_vertex(p) and base.has_vertex(q) and base.has_edge(p, q)):
            return False, "anchors:edge-missing"
        if ob.klass == "A":
            if p not in nomset or q in nomset:
                return False, "A:anchor-nomination"
            pend = sorted(nomset - {p}, key=vkey)
        else:
            if p in nomset or q in nomset:
                return False, "B:anchor-nomination"
            pend = sorted(nomset, key=vkey)
        if base.vertex_set() != frozenset({p, q, *pend}):
            return False, f"{ob.klass}:vertex-set"
        want = {frozenset((p, q))} | _pendant_edges(base, pend, (p, q))
        if base.edge_set() != frozenset(want):
            return False, f"{ob.klass}:edge-set"
        return True, "ok"

    if ob.klass == "C":
        if ob.embedding is not None:
            return False, "embedding:unexpected"
        if len(anchors) != 3 or len(set(anchors)) != 3:
            return False, "anchors:not-a-triangle"
        u, v, w = anchors
        if nomset & {u, v, w}:
            return False, "C:anchor-nominated"
        for x, y in ((u, v), (v, w), (u, w)):
            if not base.has_edge(x, y):
                return False, "C:triangle-missing"
        left = sorted((x for x in nom if set(base.neighbors(x)) == {u, v}), key=vkey)
        right = sorted((x for x in nom if set(base.neighbors(x)) == {v, w}), key=vkey)
        if len(left) != 2 or len(right) != 2 or set(left) | set(right) != nomset:
            return False, "C:pendant-pairs"
        if base.vertex_set() != frozenset({u, v, w, *nom}):
            return False, "C:vertex-set"
        want = (
            {frozenset((u, v)), frozenset((v, w)), frozenset((u, w))}
            | _pendant_edges(base, left, (u, v))
            | _pendant_edges(base, right, (v, w))
        )
        if base.edge_set() != frozenset(want):
            return False, "C:edge-set"
        return True, "ok"

    # web classes D, E, F
    if len(anchors) != 4 or len(set(anchors)) != 4:
        return False, "anchors:not-a-quad"
    if ob.klass == "D":
        if set(anchors) != nomset:
            return False, "D:outer-face-not-nominated"
        core = base
        pend: list = []
    elif ob.klass == "E":
        p, q, r, s = anchors
        if not (p in nomset and q in nomset):
            return False, "E:nominated-pair"
        if r in nomset or s in nomset:
            return False, "E:anchor-nominated"
        pend = sorted(nomset - {p, q}, key=vkey)
        for x in pend:
            if set(base.neighbors(x)) != {r, s}:
                return False, "E:pendant-neighbourhood"
        core = base.induced([x for x in base.vertices if x not in pend])
    else:
        p, q, r, s = anchors
        if set(anchors) & nomset:
            return False, "F:anchor-nominated"
        pair_pq = sorted((x for x in nom if set(base.neighbors(x)) == {p, q}), key=vkey)
        pair_rs = sorted((x for x in nom if set(base.neighbors(x)) == {r, s}), key=vkey)
        if len(pair_pq) != 2 or len(pair_rs) != 2 or set(pair_pq) | set(pair_rs) != nomset:
            return False, "F:pendant-pairs"
        pend = pair_pq + pair_rs
        core = base.induced([x for x in base.vertices if x not in nomset])
    if frozenset(core.vertex_set() | set(pend)) != base.vertex_set():
        return False, f"{ob.klass}:vertex-set"
    ok, why = verify_web(core, anchors)
    if not ok:
        return False, why
    if ob.embedding is None:
        return False, "embedding:missing"
    ok, why = ob.embedding.validate(core)
    if not ok:
        return False, f"embedding:{why}"
    if not _cyclic_eq(ob.embedding.outer_face, anchors):
        return False, "embedding:outer-face"
    return True, "ok"


def verify_obstruction(g: Graph, roots: Sequence[Vertex], ob: Obstruction) -> tuple[bool, str]:
    """Check an obstruction certificate against an instance.

    True iff the obstruction's internal invariants hold, ``roots`` equals the
    nominated set, and ``g`` is a spanning subgraph of the derived full graph
    under the identity mapping.
    """
    roots = tuple(roots)
    if len(roots) != 4 or len(set(roots)) != 4:
        return False, "roots-not-four-distinct"
    if set(roots) != set(ob.nominated):
        return False, "roots-mismatch"
    ok, why = _shape_check(ob)
    if not ok:
        return False, why
    derived = ob.plus.derived_graph()
    if g.vertex_set() != derived.vertex_set():
        return False, "spanning-vertices"
    if not g.edge_set() <= derived.edge_set():
        return False, "spanning-edges"
    return True, "ok"


def classify_vertex(ob: Obstruction, x: Vertex) -> VertexType:
    """The type of a nominated vertex, per the class-scoped definition."""
    if x not in ob.nominated:
        raise ValueError(f"classify_vertex: {x!r} is not nominated")
    base = ob.base
    if ob.klass in ("D", "E") and _adjacent_to_nominated(base, x, set(ob.nominated)):
        return VertexType.TYPE1
    if ob.klass == "A" and base.degree(x) == 4:
        return VertexType.TYPE2
    if base.degree(x) != 2:
        raise AssertionError("internal error: type-3 vertex without degree 2")
    return VertexType.TYPE3


def _finish(
    klass: str,
    base: Graph,
    cliques: Mapping,
    nominated,
    anchors,
) -> Optional[Obstruction]:
    """Assemble and validate an Obstruction; None if the shape is invalid."""
    nominated = tuple(sorted(set(nominated), key=vkey))
    embedding = None
    if klass in WEB_CLASSES:
        core = _core_graph(klass, base, nominated)
        anchors = _canon_anchor_quad(klass, anchors, nominated)
        ok, _ = verify_web(core, anchors)
        if not ok:
            return None
        embedding = derive_web_embedding(core, anchors)
    ob = Obstruction(klass, PlusGraph(base, dict(cliques)), nominated, tuple(anchors), embedding)
    ok, _ = _shape_check(ob)
    return ob if ok else None


def build_class(klass: str, *, cliques: Optional[Mapping] = None, **parts) -> Obstruction:
    """Construct a verified obstruction of the named class.

    Keyword parameters by class:

    * A: ``p``, ``q``, ``pendants`` (three vertices; nominated are p plus pendants)
    * B: ``p``, ``q``, ``pendants`` (four nominated vertices)
    * C: ``triangle`` (u, v, w with v shared), ``left_pair``, ``right_pair``
    * D: ``core`` (a web), ``outer`` (its quadrilateral; the nominated vertices)
    * E: ``core``, ``outer`` (p, q, r, s with p, q nominated), ``pendants`` (two)
    * F: ``core``, ``outer``, ``pair_pq``, ``pair_rs``

    Raises ValueError naming the violated clause otherwise.
    """
    cliques = dict(cliques or {})
    if klass == "A":
        p, q, pend = parts["p"], parts["q"], tuple(parts["pendants"])
        base = Graph([p, q, *pend], [(p, q), *[(x, a) for x in pend for a in (p, q)]])
        ob = _finish("A", base, cliques, (p, *pend), (p, q))
    elif klass == "B":
        p, q, pend = parts["p"], parts["q"], tuple(parts["pendants"])
        base = Graph([p, q, *pend], [(p, q), *[(x, a) for x in pend for a in (p, q)]])
        ob = _finish("B", base, cliques, pend, (p, q))
    elif klass == "C":
        u, v, w = parts["triangle"]
        left, right = tuple(parts["left_pair"]), tuple(parts["right_pair"])
        edges = [(u, v), (v, w), (u, w)]
        edges += [(x, a) for x in left for a in (u, v)]
        edges += [(x, a) for x in right for a in (v, w)]
        base = Graph([u, v, w, *left, *right], edges)
        ob = _finish("C", base, cliques, (*left, *right), (u, v, w))
    elif klass == "D":
        core, outer = parts["core"], tuple(parts["outer"])
        ob = _finish("D", core, cliques, outer, outer)
    elif klass == "E":
        core, outer, pend = parts["core"], tuple(parts["outer"]), tuple(parts["pendants"])
        p, q, r, s = outer
        base = core.add_vertices(pend).add_edges(
            [(x, a) for x in pend for a in (r, s)]
        )
        ob = _finish("E", base, cliques, (p, q, *pend), outer)
    elif klass == "F":
        core, outer = parts["core"], tuple(parts["outer"])
        pair_pq, pair_rs = tuple(parts["pair_pq"]), tuple(parts["pair_rs"])
        p, q, r, s = outer
        base = core.add_vertices(pair_pq + pair_rs).add_edges(
            [(x, a) for x in pair_pq for a in (p, q)]
            + [(x, a) for x in pair_rs for a in (r, s)]
        )
        ob = _finish("F", base, cliques, pair_pq + pair_rs, outer)
    else:
        raise ValueError(f"build_class: unknown class {klass!r}")
    if ob is None:
        raise ValueError(f"build_class: parameters violate the class-{klass} predicate")
    return ob


# ---------------------------------------------------------------------------
# Certificate surgeries.
# ---------------------------------------------------------------------------


def _rebuild(ob: Obstruction, base=None, cliques=None, nominated=None, anchors=None) -> Obstruction:
    base = ob.base if base is None else base
    cliques = dict(ob.plus.cliques) if cliques is None else dict(cliques)
    nominated = ob.nominated if nominated is None else nominated
    anchors = ob.anchors if anchors is None else anchors
    out = _finish(ob.klass, base, cliques, nominated, anchors)
    if out is None:
        raise AssertionError("internal error: surgery broke the class predicate")
    return out


def attach_clique(ob: Obstruction, t, extra) -> Obstruction:
    """Add the vertices ``extra`` to the clique X_T of triangle ``t``."""
    t = frozenset(t)
    extra = frozenset(extra)
    if not extra:
        return ob
    if t not in set(triangles_of(ob.base)):
        raise ValueError("attach_clique: key is not a triangle of the base")
    if extra & ob.plus.vertices():
        raise ValueError("attach_clique: new clique vertices must be fresh")
    return _rebuild(ob, cliques=dict(ob.plus.with_clique(t, extra).cliques))


def absorb_component(ob: Obstruction, where, extra) -> Obstruction:
    """Absorb ``extra`` into a clique named by a triangle or by a member vertex."""
    if isinstance(where, (set, frozenset, tuple, list)) and len(tuple(where)) == 3:
        return attach_clique(ob, frozenset(where), extra)
    t = ob.plus.clique_of(where)
    if t is None:
        raise ValueError("absorb_component: vertex is not in any clique")
    return attach_clique(ob, t, extra)


def rename_vertex(ob: Obstruction, old: Vertex, new: Vertex) -> Obstruction:
    """Rename a base vertex throughout the certificate."""
    if not ob.base.has_vertex(old):
        raise ValueError("rename_vertex: unknown vertex")
    if new in ob.plus.vertices():
        raise ValueError("rename_vertex: name already in use")

    def sub(x):
        return new if x == old else x

    base = Graph(
        [sub(v) for v in ob.base.vertices],
        [(sub(u), sub(v)) for u, v in ob.base.edges],
    )
    cliques = {
        frozenset(sub(x) for x in t): frozenset(sub(x) for x in xs)
        for t, xs in ob.plus.cliques.items()
    }
    return _rebuild(
        ob,
        base=base,
        cliques=cliques,
        nominated=tuple(sub(x) for x in ob.nominated),
        anchors=tuple(sub(x) for x in ob.anchors),
    )


def ensure_triangle_at(ob: Obstruction, x: Vertex) -> tuple[Obstruction, frozenset]:
    """Return a certificate whose base has a triangle through ``x`` (or whose
    clique region contains ``x``), together with that triangle."""
    t = ob.plus.clique_of(x)
    if t is not None:
        return ob, t
    if not ob.base.has_vertex(x):
        raise ValueError("ensure_triangle_at: unknown vertex")
    for t in triangles_of(ob.base):
        if x in t:
            return ob, t
    # Only a bare-quadrilateral web core leaves a vertex triangle-free.
    if ob.klass not in WEB_CLASSES:
        raise AssertionError("internal error: triangle-free vertex outside a web core")
    core, outer = ob.core()
    i = outer.index(x)
    opp = outer[(i + 2) % 4]
    nxt = outer[(i + 1) % 4]
    ob2 = _rebuild(ob, base=ob.base.add_edges([(x, opp)]))
    return ob2, frozenset((x, nxt, opp))


def ensure_edge_in_triangle(ob: Obstruction, u: Vertex, v: Vertex) -> tuple[Obstruction, frozenset]:
    """Return a certificate in which u and v share a clique region T + X_T."""
    base = ob.base
    if base.has_vertex(u) and base.has_vertex(v):
        if not base.has_edge(u, v):
            raise ValueError("ensure_edge_in_triangle: edge not in the base")
        for t in triangles_of(base):
            if u in t and v in t:
                return ob, t
        if ob.klass not in WEB_CLASSES:
            raise AssertionError("internal error: triangle-free edge outside a web core")
        core, outer = ob.core()
        i = outer.index(u)
        if outer[(i + 1) % 4] == v:
            opp = outer[(i + 2) % 4]
            ob2 = _rebuild(ob, base=base.add_edges([(u, opp)]))
            return ob2, frozenset((u, v, opp))
        if outer[(i - 1) % 4] == v:
            opp = outer[(i - 2) % 4]
            ob2 = _rebuild(ob, base=base.add_edges([(u, opp)]))
            return ob2, frozenset((u, v, opp))
        raise AssertionError("internal error: quad edge not on the outer cycle")
    for t in _sorted_tris(ob.plus.cliques):
        region = ob.plus.region(t)
        if u in region and v in region:
            return ob, t
    raise ValueError("ensure_edge_in_triangle: endpoints share no clique region")


def insert_outerface_vertex(ob: Obstruction, u: Vertex, new_root: Vertex) -> tuple[Obstruction, frozenset]:
    """Replace outer-cycle vertex ``u`` by ``new_root`` on the outer face.

    The type-1 surgery: ``new_root`` is drawn in the outer face adjacent to
    ``u`` and u's two outer neighbours x, y, taking u's corner; ``u`` becomes
    an internal vertex.  When x and y are adjacent (so u has degree 2), ``u``
    is deleted instead and parked in the clique of the new corner triangle.
    Returns the new certificate and the triangle whose clique the caller
    should absorb the separated lobe into.
    """
    if ob.klass not in ("D", "E"):
        raise ValueError("insert_outerface_vertex: requires a class D or E certificate")
    if classify_vertex(ob, u) is not VertexType.TYPE1:
        raise ValueError("insert_outerface_vertex: vertex is not type-1")
    if new_root in ob.plus.vertices():
        raise ValueError("insert_outerface_vertex: new root name already in use")
    core, outer = ob.core()
    i = outer.index(u)
    x, y = outer[(i - 1) % 4], outer[(i + 1) % 4]
    nominated = tuple(new_root if z == u else z for z in ob.nominated)
    anchors = tuple(new_root if z == u else z for z in ob.anchors)
    if core.has_edge(x, y):
        if core.degree(u) != 2:
            raise AssertionError("internal error: chorded corner with extra degree")
        old_t = frozenset((u, x, y))
        base = ob.base.remove_vertices([u]).add_vertices([new_root]).add_edges(
            [(new_root, x), (new_root, y)]
        )
        new_t = frozenset((new_root, x, y))
        cliques = {}
        for t, xs in ob.plus.cliques.items():
            cliques[new_t if t == old_t else t] = xs
        cliques[new_t] = cliques.get(new_t, frozenset()) | {u}
        return _rebuild(ob, base=base, cliques=cliques, nominated=nominated, anchors=anchors), new_t
    base = ob.base.add_vertices([new_root]).add_edges(
        [(new_root, x), (new_root, u), (new_root, y)]
    )
    t_absorb = frozenset((new_root, u, min((x, y), key=vkey)))
    return _rebuild(ob, base=base, nominated=nominated, anchors=anchors), t_absorb


def replace_type3(ob: Obstruction, u: Vertex, new_root: Vertex) -> tuple[Obstruction, frozenset]:
    """Swap the type-3 nominated vertex ``u`` for ``new_root`` in its triangle."""
    if classify_vertex(ob, u) is not VertexType.TYPE3:
        raise ValueError("replace_type3: vertex is not type-3")
    if new_root in ob.plus.vertices():
        raise ValueError("replace_type3: new root name already in use")
    x, y = ob.base.neighbors(u)
    old_t = frozenset((u, x, y))
    new_t = frozenset((new_root, x, y))
    base = ob.base.remove_vertices([u]).add_vertices([new_root]).add_edges(
        [(new_root, x), (new_root, y)]
    )
    cliques = {}
    for t, xs in ob.plus.cliques.items():
        cliques[new_t if t == old_t else t] = xs
    nominated = tuple(new_root if z == u else z for z in ob.nominated)
    anchors = tuple(new_root if z == u else z for z in ob.anchors)
    return _rebuild(ob, base=base, cliques=cliques, nominated=nominated, anchors=anchors), new_t


def graft_pendant_root(ob: Obstruction, u: Vertex, b: Vertex, new_root: Vertex) -> tuple[Obstruction, frozenset]:
    """The contraction-and-retype surgery at an adjacent nominated pair u, b.

    ``u`` loses its nomination to the fresh vertex ``new_root`` which is
    attached next to the base edge ub.  Dispatches on u's type: type-1 keeps
    the web class (or degenerates to class A when ub is the quadrilateral's
    diagonal), type-2 turns class A into class E, type-3 swaps the pendant.
    Returns the new certificate and the triangle for lobe absorption.
    """
    if u not in ob.nominated or b not in ob.nominated:
        raise ValueError("graft_pendant_root: u and b must be nominated")
    if not ob.base.has_edge(u, b):
        raise ValueError("graft_pendant_root: ub must be a base edge")
    if new_root in ob.plus.vertices():
        raise ValueError("graft_pendant_root: new root name already in use")
    kind = classify_vertex(ob, u)

    if kind is VertexType.TYPE3:
        # class A with u a pendant and b the hub; same surgery as replace_type3
        return replace_type3(ob, u, new_root)

    if kind is VertexType.TYPE2:
        # class A with u the hub and b a pendant: the core quadrilateral
        # (new_root, b, q, u) with diagonal ub makes a class-E certificate.
        q = ob.anchors[1]
        others = tuple(sorted(set(ob.nominated) - {u, b}, key=vkey))
        base = ob.base.add_vertices([new_root]).add_edges(
            [(new_root, u), (new_root, b)]
        )
        out = _finish("E", base, dict(ob.plus.cliques), (new_root, b, *others), (new_root, b, q, u))
        if out is None:
            raise AssertionError("internal error: type-2 graft failed")
        return out, frozenset((new_root, u, b))

    # type-1: u on the web core's outer cycle
    core, outer = ob.core()
    i = outer.index(u)
    if b in (outer[(i - 1) % 4], outer[(i + 1) % 4]):
        # ub on the outer cycle: same surgery as the outer-face insertion,
        # aiming the absorption triangle at b in the generic case.
        ob2, t_absorb = insert_outerface_vertex(ob, u, new_root)
        if u in ob2.base.vertex_set():
            t_absorb = frozenset((new_root, u, b))
        return ob2, t_absorb
    # ub is the quadrilateral's diagonal, forcing the core to be exactly
    # the quadrilateral plus this diagonal; the result is a class-A
    # certificate with hub b and partner u.
    if ob.klass != "D" or core.n != 4:
        raise AssertionError("internal error: diagonal graft outside a small web")
    x, y = (z for z in outer if z not in (u, b))
    base = ob.base.add_vertices([new_root]).add_edges(
        [(new_root, u), (new_root, b)]
    )
    nominated = (b, new_root, x, y)
    out = _finish("A", base, dict(ob.plus.cliques), nominated, (b, u))
    if out is None:
        raise AssertionError("internal error: diagonal graft failed")
    return out, frozenset((new_root, u, b))


# ---------------------------------------------------------------------------
# Joining certificates at a cut pair.
# ---------------------------------------------------------------------------


def _glue(base1: Graph, base2: Graph, u: Vertex, v: Vertex) -> Graph:
    shared = base1.vertex_set() & base2.vertex_set()
    if shared != {u, v}:
        raise ValueError("join: sides must share exactly the cut pair")
    return Graph(
        list(base1.vertices) + [x for x in base2.vertices if x not in (u, v)],
        list(base1.edges) + list(base2.edges),
    )


def _pretriangulate_bare_core(ob: Obstruction, u: Vertex, v: Vertex) -> Obstruction:
    """Add a diagonal to a bare-quadrilateral web core before a join surgery."""
    if ob.klass not in WEB_CLASSES:
        return ob
    core, outer = ob.core()
    if triangles_of(core):
        return ob
    x = min((u, v), key=vkey)
    i = outer.index(x)
    return _rebuild(ob, base=ob.base.add_edges([(x, outer[(i + 2) % 4])]))


def _migrate_cliques(pairs, new_base: Graph, rekey: dict) -> dict:
    tris = set(triangles_of(new_base))
    out: dict = {}
    for t, xs in pairs:
        t2 = rekey.get(t, t)
        if t2 not in tris:
            raise AssertionError("internal error: clique key lost in join")
        out[t2] = out.get(t2, frozenset()) | xs
    return out


def _join_clip(base: Graph, boundary: list, z: Vertex, other: Vertex):
    """Plan the clipping of hexagon corner ``z`` (gray its two neighbours).

    Returns (gray edge, deleted?, T*), where deleted means ``z`` leaves the
    base for the clique of T* because ``other`` is adjacent to both of z's
    boundary neighbours (the double-diagonal degeneracy).
    """
    i = boundary.index(z)
    x, y = boundary[i - 1], boundary[(i + 1) % len(boundary)]
    gray = (x, y)
    if base.has_edge(other, x) and base.has_edge(other, y):
        return gray, True, frozenset((x, y, other))
    return gray, False, None


def _side_descriptor(ob: Obstruction, u: Vertex, v: Vertex) -> dict:
    """Normalize one side of a cut-pair join."""
    if u not in ob.nominated or v not in ob.nominated:
        raise ValueError("join: cut pair must be nominated on both sides")
    if not ob.base.has_edge(u, v):
        raise ValueError("join: cut pair must be a base edge on both sides")
    leftover = tuple(sorted(set(ob.nominated) - {u, v}, key=vkey))
    if ob.klass == "A":
        p, q = ob.anchors
        if p not in (u, v):
            raise ValueError("join: class-A cut pair must include the hub")
        hub, z = (u, v) if u == p else (v, u)
        return dict(kind="A", ob=ob, hub=hub, z=z, q=q, leftover=leftover)
    if ob.klass == "D":
        outer = ob.anchors
        i = outer.index(u)
        if v in (outer[(i - 1) % 4], outer[(i + 1) % 4]):
            ob = _pretriangulate_bare_core(ob, u, v)
            quad = _orient_quad(ob.anchors, u, v)
            return dict(kind="D-outer", ob=ob, quad=quad, leftover=leftover)
        if ob.base.n != 4:
            raise AssertionError("internal error: web diagonal in a large core")
        return dict(kind="D-diag", ob=ob, leftover=leftover)
    if ob.klass == "E":
        p, q, r, s = ob.anchors
        if {u, v} != {p, q}:
            raise ValueError("join: class-E cut pair must be the nominated pair")
        ob = _pretriangulate_bare_core(ob, u, v)
        quad = _orient_quad(ob.anchors, u, v)
        return dict(kind="E", ob=ob, quad=quad, leftover=leftover)
    raise ValueError(f"join: class {ob.klass} cannot appear at a cut pair")


def _boundary_path(desc: dict, u: Vertex, v: Vertex) -> list:
    """The side's outer walk from v to u avoiding the edge uv."""
    quad = desc["quad"]
    oriented = _orient_quad(quad, u, v)
    return [v, oriented[2], oriented[3], u]


def _join_candidates(d1: dict, d2: dict, u: Vertex, v: Vertex) -> Iterator[dict]:
    """Yield candidate certificates for a cut-pair join, best guess first."""
    kinds = (d1["kind"], d2["kind"])
    b1, b2 = d1["ob"].base, d2["ob"].base
    pairs = list(d1["ob"].plus.cliques.items()) + list(d2["ob"].plus.cliques.items())
    nominated = d1["leftover"] + d2["leftover"]

    if kinds == ("A", "A"):
        if d1["hub"] == d2["hub"]:
            hub, z = d1["hub"], d1["z"]
            q1, q2 = d1["q"], d2["q"]
            verts = [hub, q1, q2, *nominated]
            edges = [(q1, hub), (q2, hub), (q1, q2)]
            edges += [(x, a) for x in d1["leftover"] for a in (hub, q1)]
            edges += [(x, a) for x in d2["leftover"] for a in (hub, q2)]
            base = Graph(verts, edges)
            t_star = frozenset((q1, hub, q2))
            rekey = {t: t_star for t in set(triangles_of(b1)) | set(triangles_of(b2)) if z in t}
            cliques = _migrate_cliques(pairs, base, rekey)
            cliques[t_star] = cliques.get(t_star, frozenset()) | {z}
            yield dict(klass="C", base=base, cliques=cliques,
                       nominated=nominated, anchors=(q1, hub, q2))
        else:
            h1, h2 = d1["hub"], d2["hub"]
            q1, q2 = d1["q"], d2["q"]
            base = _glue(b1, b2, u, v)
            cliques = _migrate_cliques(pairs, base, {})
            yield dict(klass="F", base=base, cliques=cliques,
                       nominated=nominated, anchors=(q1, h1, q2, h2))
        return

    if kinds in (("A", "D-diag"), ("A", "E"), ("A", "D-outer")):
        hub, z, q1 = d1["hub"], d1["z"], d1["q"]
        if kinds[1] == "D-diag":
            base = _glue(b1, b2, u, v)
            cliques = _migrate_cliques(pairs, base, {})
            yield dict(klass="C", base=base, cliques=cliques,
                       nominated=nominated, anchors=(q1, hub, z))
            return
        # tuck q1 into z's corner of the web core
        quad = _orient_quad(d2["quad"], hub, z)
        m, w = quad[2], quad[3]  # z's far outer neighbour, then the hub's
        glued = _glue(b1, b2, u, v)
        if glued.has_edge(hub, m):
            # degenerate: z has degree 2 on this side; delete it
            base = glued.remove_vertices([z]).add_edges([(q1, m)])
            t_star = frozenset((hub, q1, m))
            rekey = {t: t_star for t in set(triangles_of(b1)) | set(triangles_of(b2)) if z in t}
            cliques = _migrate_cliques(pairs, base, rekey)
            cliques[t_star] = cliques.get(t_star, frozenset()) | {z}
        else:
            base = glued.add_edges([(q1, m)])
            cliques = _migrate_cliques(pairs, base, {})
        if kinds[1] == "D-outer":
            yield dict(klass="E", base=base, cliques=cliques,
                       nominated=nominated, anchors=(m, w, hub, q1))
        else:
            yield dict(klass="F", base=base, cliques=cliques,
                       nominated=nominated, anchors=(hub, q1, m, w))
        return

    if kinds == ("D-diag", "D-diag"):
        base = _glue(b1, b2, u, v)
        cliques = _migrate_cliques(pairs, base, {})
        yield dict(klass="B", base=base, cliques=cliques,
                   nominated=nominated, anchors=tuple(sorted((u, v), key=vkey)))
        return

    if kinds in (("D-diag", "D-outer"), ("D-diag", "E")):
        base = _glue(b1, b2, u, v)
        cliques = _migrate_cliques(pairs, base, {})
        quad = d2["quad"]
        if kinds[1] == "D-outer":
            # the outer side stays the core; the diagonal side's pendants hang on uv
            yield dict(klass="E", base=base, cliques=cliques,
                       nominated=nominated, anchors=(quad[2], quad[3], quad[0], quad[1]))
        else:
            yield dict(klass="F", base=base, cliques=cliques,
                       nominated=nominated, anchors=(quad[0], quad[1], quad[2], quad[3]))
        return

    if kinds in (("D-outer", "D-outer"), ("D-outer", "E"), ("E", "E")):
        path1 = _boundary_path(d1, u, v)
        path2 = _boundary_path(d2, u, v)
        x1, x2 = path1[1], path1[2]
        y1, y2 = path2[1], path2[2]
        glued = _glue(b1, b2, u, v)
        gray_u, del_u, tu = _join_clip(glued, [v, x1, x2, u, y2, y1], u, v)
        gray_v, del_v, tv = _join_clip(glued, [v, x1, x2, u, y2, y1], v, u)
        if del_u and del_v:
            raise AssertionError("internal error: both clip corners degenerate")
        base = glued.add_edges([gray_u, gray_v])
        rekey: dict = {}
        extra_members: dict = {}
        for z, deleted, t_star in ((u, del_u, tu), (v, del_v, tv)):
            if deleted:
                base = base.remove_vertices([z])
                for t in set(triangles_of(b1)) | set(triangles_of(b2)):
                    if z in t:
                        rekey[t] = t_star
                extra_members[t_star] = extra_members.get(t_star, frozenset()) | {z}
        cliques = _migrate_cliques(pairs, base, rekey)
        for t_star, members in extra_members.items():
            cliques[t_star] = cliques.get(t_star, frozenset()) | members
        quad = (x1, x2, y2, y1)
        if kinds == ("D-outer", "D-outer"):
            yield dict(klass="D", base=base, cliques=cliques,
                       nominated=nominated, anchors=quad)
        elif kinds == ("D-outer", "E"):
            yield dict(klass="E", base=base, cliques=cliques,
                       nominated=nominated, anchors=(x1, x2, y2, y1))
        else:
            yield dict(klass="F", base=base, cliques=cliques,
                       nominated=nominated, anchors=(x1, x2, y2, y1))
        return

    raise AssertionError(f"internal error: unhandled join row {kinds}")


_JOIN_RANK = {"A": 0, "D-diag": 1, "D-outer": 2, "E": 3}


def join_at_cut_pair(
    ob1: Obstruction,
    ob2: Obstruction,
    u: Vertex,
    v: Vertex,
    *,
    graph: Optional[Graph] = None,
    roots: Optional[Sequence[Vertex]] = None,
) -> Obstruction:
    """Join two certificates that share the nominated, adjacent cut pair u, v.

    ``ob1`` certifies one side plus the edge uv, ``ob2`` the other; the result
    certifies their union with u and v no longer nominated.  When ``graph``
    and ``roots`` are supplied, the joined certificate is fully verified
    against them before being returned.
    """
    d1 = _side_descriptor(ob1, u, v)
    d2 = _side_descriptor(ob2, u, v)
    if _JOIN_RANK[d1["kind"]] > _JOIN_RANK[d2["kind"]]:
        d1, d2 = d2, d1
    for cand in _join_candidates(d1, d2, u, v):
        ob = _finish(cand["klass"], cand["base"], cand["cliques"],
                     cand["nominated"], cand["anchors"])
        if ob is None:
            continue
        if graph is not None and roots is not None:
            ok, _ = verify_obstruction(graph, roots, ob)
            if not ok:
                continue
        return ob
    raise AssertionError("internal error: cut-pair join produced no valid certificate")


# ---------------------------------------------------------------------------
# Web completion: spanning a cofacial instance into a class-D certificate.
# ---------------------------------------------------------------------------


def _polygon_triangulations(walk: Sequence, can_add) -> Iterator[tuple]:
    """All triangulations of a simple face cycle, as tuples of chords.

    ``can_add(x, y)`` limits usable chords; triangulations are emitted in a
    deterministic order, fanning from low indices first.
    """
    n = len(walk)

    def chords(i: int, j: int) -> Iterator[tuple]:
        if j - i < 2:
            yield ()
            return
        for m in range(i + 1, j):
            need = []
            if m - i > 1:
                if not can_add(walk[i], walk[m]):
                    continue
                need.append((walk[i], walk[m]))
            if j - m > 1:
                if not can_add(walk[m], walk[j]):
                    continue
                need.append((walk[m], walk[j]))
            for left in chords(i, m):
                for right in chords(m, j):
                    yield tuple(need) + left + right

    return chords(0, n - 1)


def web_completion(
    g: Graph,
    faces: Sequence[tuple],
    root_face: tuple,
    roots: Sequence[Vertex],
    *,
    max_tries: int = 5000,
) -> Optional[Obstruction]:
    """Complete an embedded graph with all roots on one face into a web.

    ``faces`` are the face walks of a planar embedding of ``g`` and
    ``root_face`` the walk holding all four roots.  The completion adds the
    root quadrilateral inside that face and searches triangulations of every
    other face until the whole graph verifies as a web with the roots as its
    outer quadrilateral, yielding a class-D certificate.  Returns None when
    the (bounded) search fails.
    """
    roots = tuple(roots)
    walk = tuple(root_face)
    if len(set(walk)) != len(walk):
        return None  # non-simple walk: cannot host the root quadrilateral
    if any(r not in walk for r in roots):
        return None
    order = tuple(x for x in walk if x in set(roots))
    if len(order) != 4:
        return None
    added: set[frozenset] = set()

    def can_add(x, y):
        if x == y:
            return False
        e = frozenset((x, y))
        return not g.has_edge(x, y) and e not in added

    # the root quadrilateral, drawn inside the root face
    pockets: list[tuple] = []
    k = len(walk)
    pos = {x: i for i, x in enumerate(walk)}
    for idx in range(4):
        a, b = order[idx], order[(idx + 1) % 4]
        i, j = pos[a], pos[b]
        seg = []
        t = i
        while t != j:
            t = (t + 1) % k
            seg.append(walk[t])
        if len(seg) == 1:
            if not g.has_edge(a, b):
                return None
            continue
        if g.has_edge(a, b):
            return None  # chord drawn elsewhere: this face cannot host the quad
        added.add(frozenset((a, b)))
        pockets.append((a, *seg[:-1], b))

    todo = [tuple(f) for f in faces if not _cyclic_eq(f, root_face)] + pockets
    todo = [f for f in todo if len(f) > 3]
    todo.sort(key=lambda f: tuple(vkey(x) for x in canonical_cycle(f)))
    budget = [max_tries]

    def solve(i: int) -> Optional[Graph]:
        if budget[0] <= 0:
            return None
        if i == len(todo):
            budget[0] -= 1
            h = g.add_edges([tuple(e) for e in added])
            ok, _ = verify_web(h, order)
            return h if ok else None
        face = todo[i]
        if len(set(face)) != len(face):
            return None  # non-simple walk: outside this builder's remit
        for chords in _polygon_triangulations(face, can_add):
            for e in chords:
                added.add(frozenset(e))
            result = solve(i + 1)
            if result is not None:
                return result
            for e in chords:
                added.discard(frozenset(e))
            if budget[0] <= 0:
                return None
        return None

    h = solve(0)
    if h is None:
        return None
    return _finish("D", h, {}, order, order)


def cofacial_obstruction(
    g: Graph,
    faces: Sequence[tuple],
    root_face: tuple,
    roots: Sequence[Vertex],
) -> Optional[Obstruction]:
    """Class-D certificate for an embedded graph whose roots share a face.

    Generalises :func:`web_completion`: after drawing the root quadrilateral
    inside ``root_face`` and triangulating every other face, vertex sets
    hanging inside a non-facial triangle — which no choice of diagonals can
    dissolve — are moved into the clique attached to that triangle.  Returns
    None when the face system cannot host the quadrilateral at all.
    """
    roots = tuple(roots)
    walk = tuple(root_face)
    if len(set(walk)) != len(walk):
        return None
    if any(r not in walk for r in roots):
        return None
    order = tuple(x for x in walk if x in set(roots))
    if len(order) != 4:
        return None
    added: set[frozenset] = set()

    def can_add(x, y):
        if x == y:
            return False
        return not g.has_edge(x, y) and frozenset((x, y)) not in added

    pockets: list[tuple] = []
    k = len(walk)
    pos = {x: i for i, x in enumerate(walk)}
    for idx in range(4):
        a, b = order[idx], order[(idx + 1) % 4]
        i, j = pos[a], pos[b]
        seg = []
        t = i
        while t != j:
            t = (t + 1) % k
            seg.append(walk[t])
        if len(seg) == 1:
            if not g.has_edge(a, b):
                return None
            continue
        if g.has_edge(a, b):
            return None  # chord drawn elsewhere: this face cannot host the quad
        added.add(frozenset((a, b)))
        pockets.append((a, *seg[:-1], b))

    todo = [tuple(f) for f in faces if not _cyclic_eq(f, root_face)] + pockets
    todo = [f for f in todo if len(f) > 3]
    todo.sort(key=lambda f: tuple(vkey(x) for x in canonical_cycle(f)))
    # Any triangulation will do: the scooping below repairs whatever
    # non-facial triangles the choice of diagonals produces.
    for face in todo:
        if len(set(face)) != len(face):
            return None
        chords = next(_polygon_triangulations(face, can_add), None)
        if chords is None:
            return None
        added.update(frozenset(e) for e in chords)

    core = g.add_edges([tuple(e) for e in added])
    rset = set(roots)
    groups: list[tuple[frozenset, frozenset]] = []
    while True:
        best = None
        for t in triangles_of(core):
            rest = core.remove_vertices(t)
            loose: set = set()
            for comp in rest.components():
                if not (comp & rset):
                    loose |= comp
            if not loose:
                continue
            key = (-len(loose), skey(t))
            if best is None or key < best[0]:
                best = (key, t, frozenset(loose))
        if best is None:
            break
        _, t, loose = best
        groups.append((t, loose))
        core = core.remove_vertices(loose)

    # A later scoop may swallow a vertex of an earlier scoop's triangle; the
    # swallowing triangle's region then covers the earlier group in full.
    removed_at = {v: i for i, (_, loose) in enumerate(groups) for v in loose}

    def host(i: int) -> int:
        later = [removed_at[v] for v in groups[i][0] if v in removed_at]
        return host(max(later)) if later else i

    cliques: dict[frozenset, set] = {}
    for i, (_, loose) in enumerate(groups):
        cliques.setdefault(groups[host(i)][0], set()).update(loose)

    ob = _finish("D", core, cliques, order, order)
    if ob is None:
        return None
    ok, _ = verify_obstruction(g, roots, ob)
    return ob if ok else None


# ---------------------------------------------------------------------------
# Structural reduction used by the soundness tests.
# ---------------------------------------------------------------------------


def strip_pendant_pair(ob: Obstruction) -> tuple[Obstruction, tuple, tuple]:
    """Remove one nominated pendant pair, nominating its anchors instead.

    Mirrors the ear reduction on the certificate side: class B descends to a
    class-D quadrilateral-with-diagonal, C to A, E to D, and F to E.  Returns
    (reduced certificate, removed pair, anchor pair).
    """
    base = ob.base
    nom = set(ob.nominated)
    pairs: dict[frozenset, list] = {}
    for x in sorted(nom, key=vkey):
        nbrs = base.neighbors(x)
        if len(nbrs) == 2 and not (set(nbrs) & nom):
            pairs.setdefault(frozenset(nbrs), []).append(x)
    choice = None
    for anchors_set in sorted(pairs, key=skey):
        if len(pairs[anchors_set]) >= 2:
            choice = (anchors_set, tuple(pairs[anchors_set][:2]))
            break
    if choice is None:
        raise ValueError("strip_pendant_pair: no nominated pendant pair")
    anchors_set, removed = choice
    w1, w2 = sorted(anchors_set, key=vkey)
    new_nom = tuple(sorted((nom - set(removed)) | {w1, w2}, key=vkey))
    new_base = base.remove_vertices(removed)

    def rekey_target_in(h: Graph):
        for t in sorted(set(triangles_of(h)), key=skey):
            if w1 in t and w2 in t:
                return t
        return None

    orphaned = any(set(t) & set(removed) for t in ob.plus.cliques)
    rekey_target = rekey_target_in(new_base)
    if orphaned and rekey_target is None:
        # bare-quadrilateral core: chord it so the orphaned cliques can land
        if ob.klass not in ("E", "F"):
            raise AssertionError("internal error: no triangle to re-key onto")
        outer = ob.anchors
        i = outer.index(w1)
        new_base = new_base.add_edges([(w1, outer[(i + 2) % 4])])
        rekey_target = rekey_target_in(new_base)
        if rekey_target is None:
            raise AssertionError("internal error: chorded core still lacks a key")
    cliques = {}
    for t, xs in ob.plus.cliques.items():
        if set(t) & set(removed):
            t = rekey_target
        cliques[t] = cliques.get(t, frozenset()) | xs

    if ob.klass == "B":
        kept = tuple(sorted(nom - set(removed), key=vkey))
        out = _finish("D", new_base, cliques, new_nom, (kept[0], w1, kept[1], w2))
    elif ob.klass == "C":
        hub = ob.anchors[1]
        far = (set(ob.anchors) - anchors_set).pop()
        out = _finish("A", new_base, cliques, new_nom, (hub, far))
    elif ob.klass == "E":
        p, q, r, s = ob.anchors
        out = _finish("D", new_base, cliques, new_nom, (p, q, r, s))
    elif ob.klass == "F":
        p, q, r, s = ob.anchors
        if {w1, w2} == {p, q}:
            out = _finish("E", new_base, cliques, new_nom, (p, q, r, s))
        else:
            out = _finish("E", new_base, cliques, new_nom, (r, s, p, q))
    else:
        raise ValueError(f"strip_pendant_pair: class {ob.klass} has no pendant pair")
    if out is None:
        raise AssertionError("internal error: pendant-pair strip failed")
    return out, removed, (w1, w2)


# ---------------------------------------------------------------------------
# Seeded generators (the atlas).
# ---------------------------------------------------------------------------


def random_web(rng: random.Random, size: int, prefix: str = "h") -> tuple[Graph, tuple]:
    """A pseudo-random web with ``size`` vertices and a fixed outer quad.

    Grown from a seed web by repeatedly replacing an internal edge xy (with
    incident triangles xyz1, xyz2 and z1, z2 non-adjacent) by a new internal
    vertex adjacent to x, y, z1, z2 — the one local move that preserves
    every web axiom.
    """
    if size < 4:
        raise ValueError("random_web: webs have at least 4 vertices")
    outer = tuple(f"{prefix}{i}" for i in range(4))
    quad = [(outer[i], outer[(i + 1) % 4]) for i in range(4)]
    if size == 4:
        if rng.random() < 0.5:
            return Graph(outer, quad), outer
        diag = (outer[0], outer[2]) if rng.random() < 0.5 else (outer[1], outer[3])
        return Graph(outer, quad + [diag]), outer
    g = Graph(outer, quad + [(outer[0], outer[2])])
    counter = 4
    while g.n < size:
        tris = triangles_of(g)
        quadset = {frozenset((outer[i], outer[(i + 1) % 4])) for i in range(4)}
        candidates = []
        for uu, vv in g.edges:
            e = frozenset((uu, vv))
            if e in quadset:
                continue
            incident = [t for t in tris if e <= t]
            if len(incident) != 2:
                continue
            z1 = next(iter(incident[0] - e))
            z2 = next(iter(incident[1] - e))
            if not g.has_edge(z1, z2):
                candidates.append((uu, vv, z1, z2))
        if not candidates:
            raise AssertionError("internal error: web growth stalled")
        uu, vv, z1, z2 = candidates[rng.randrange(len(candidates))]
        w = f"{prefix}{counter}"
        counter += 1
        g = g.remove_edge(uu, vv).add_vertices([w]).add_edges(
            [(w, uu), (w, vv), (w, z1), (w, z2)]
        )
    ok, why = verify_web(g, outer)
    if not ok:
        raise AssertionError(f"internal error: grown web invalid ({why})")
    return g, outer


def _random_cliques(rng: random.Random, base: Graph, budget: int, prefix: str = "x") -> dict:
    tris = triangles_of(base)
    cliques: dict = {}
    if not tris or budget <= 0:
        return cliques
    names = iter(fresh_vertices(base, budget, prefix=prefix))
    for _ in range(budget):
        t = tris[rng.randrange(len(tris))]
        x = next(names)
        cliques[t] = cliques.get(t, frozenset()) | {x}
    return cliques


#: Smallest possible vertex count of each class (base graph, empty cliques).
CLASS_MINIMUM_SIZE = {"A": 5, "B": 6, "C": 7, "D": 4, "E": 6, "F": 8}


def random_obstruction(rng: random.Random, klass: str, size_budget: int) -> Obstruction:
    """A pseudo-random verified obstruction of the named class.

    The total vertex count (base plus cliques) is at most ``size_budget``.
    Raises ValueError when the budget is below the class minimum.
    """
    if klass not in CLASS_NAMES:
        raise ValueError(f"random_obstruction: unknown class {klass!r}")
    if size_budget < CLASS_MINIMUM_SIZE[klass]:
        raise ValueError("random_obstruction: size budget below class minimum")
    if klass == "A":
        ob = build_class("A", p="p", q="q", pendants=("t0", "t1", "t2"))
    elif klass == "B":
        ob = build_class("B", p="p", q="q", pendants=("t0", "t1", "t2", "t3"))
    elif klass == "C":
        ob = build_class(
            "C", triangle=("u", "v", "w"),
            left_pair=("t0", "t1"), right_pair=("t2", "t3"),
        )
    elif klass == "D":
        core_size = rng.randint(4, size_budget)
        core, outer = random_web(rng, core_size)
        ob = build_class("D", core=core, outer=outer)
    elif klass == "E":
        core_size = rng.randint(4, size_budget - 2)
        core, outer = random_web(rng, core_size)
        ob = build_class("E", core=core, outer=outer, pendants=("n0", "n1"))
    else:
        core_size = rng.randint(4, size_budget - 4)
        core, outer = random_web(rng, core_size)
        ob = build_class(
            "F", core=core, outer=outer,
            pair_pq=("n0", "n1"), pair_rs=("n2", "n3"),
        )
    room = size_budget - len(ob.plus.vertices())
    if room > 0:
        budget = rng.randint(0, room)
        cliques = _random_cliques(rng, ob.base, budget)
        merged = dict(ob.plus.cliques)
        for t, xs in cliques.items():
            merged[t] = merged.get(t, frozenset()) | xs
        ob = _rebuild(ob, cliques=merged)
    return ob
