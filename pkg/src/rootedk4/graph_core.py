"""Core graph data structures and combinatorial operations.

This module provides the immutable :class:`Graph` value type used across
the package, together with the small set of graph-theoretic primitives the
decision procedure is built from: edge contraction, separation enumeration,
cycles through prescribed vertices, Menger-style fans, and planar
embeddings with explicit face lists.

All iteration orders are deterministic.  Vertices may be ints or strings;
mixed vertex types are ordered by :func:`vkey`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import networkx as nx

Vertex = object  # ints or strings; ordered via vkey


def vkey(v):
    """Total order key for vertices of mixed type (ints sort before strs)."""
    return (type(v).__name__, v)


def svert(vs: Iterable) -> tuple:
    """Sort an iterable of vertices into a deterministic tuple."""
    return tuple(sorted(vs, key=vkey))


def skey(vs: Iterable) -> tuple:
    """Sort key for collections of vertex sets (safe across mixed id types)."""
    return tuple(vkey(v) for v in sorted(vs, key=vkey))


class Graph:
    """An immutable, simple, undirected graph.

    Vertices are arbitrary hashable ids (ints or strings in practice).
    Loops are rejected; parallel edges collapse.  All accessors return
    deterministically sorted tuples.
    """

    __slots__ = ("_adj", "_vertices", "_edges")

    def __init__(self, vertices: Iterable = (), edges: Iterable = ()):
        adj: dict = {}
        for v in vertices:
            adj.setdefault(v, set())
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u!r}")
            adj.setdefault(u, set())
            adj.setdefault(v, set())
            adj[u].add(v)
            adj[v].add(u)
        self._vertices = svert(adj)
        self._adj = {v: svert(adj[v]) for v in self._vertices}
        norm = set()
        for u in adj:
            for v in adj[u]:
                norm.add((u, v) if vkey(u) < vkey(v) else (v, u))
        self._edges = tuple(sorted(norm, key=lambda e: (vkey(e[0]), vkey(e[1]))))

    # -- basic accessors -------------------------------------------------

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        return self._edges

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    def has_vertex(self, v) -> bool:
        return v in self._adj

    def has_edge(self, u, v) -> bool:
        return u in self._adj and v in self._adj[u]

    def neighbors(self, v) -> tuple:
        return self._adj[v]

    def degree(self, v) -> int:
        return len(self._adj[v])

    def vertex_set(self) -> frozenset:
        return frozenset(self._vertices)

    def edge_set(self) -> frozenset:
        return frozenset(frozenset(e) for e in self._edges)

    # -- derived graphs ---------------------------------------------------

    def add_vertices(self, vs: Iterable) -> "Graph":
        return Graph(tuple(self._vertices) + tuple(vs), self._edges)

    def add_edges(self, es: Iterable) -> "Graph":
        return Graph(self._vertices, tuple(self._edges) + tuple(tuple(e) for e in es))

    def remove_vertices(self, vs: Iterable) -> "Graph":
        drop = set(vs)
        return Graph(
            (v for v in self._vertices if v not in drop),
            (e for e in self._edges if e[0] not in drop and e[1] not in drop),
        )

    def remove_edge(self, u, v) -> "Graph":
        if not self.has_edge(u, v):
            raise ValueError(f"no edge {u!r}-{v!r}")
        pair = frozenset((u, v))
        return Graph(self._vertices, (e for e in self._edges if frozenset(e) != pair))

    def induced(self, vs: Iterable) -> "Graph":
        keep = set(vs)
        unknown = keep - set(self._adj)
        if unknown:
            raise ValueError(f"unknown vertices {svert(unknown)!r}")
        return Graph(
            keep, (e for e in self._edges if e[0] in keep and e[1] in keep)
        )

    # -- connectivity helpers ---------------------------------------------

    def components(self) -> tuple:
        """Connected components as frozensets, sorted by smallest member."""
        seen: set = set()
        out = []
        for start in self._vertices:
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in self._adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return tuple(out)

    def components_without(self, banned: Iterable) -> tuple:
        """Components of the graph minus `banned`, without rebuilding it."""
        drop = set(banned)
        seen: set = set()
        out = []
        for start in self._vertices:
            if start in seen or start in drop:
                continue
            comp = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in self._adj[x]:
                    if y not in comp and y not in drop:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return tuple(out)

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def connected_in(self, vs: Iterable) -> bool:
        """True if the given nonempty vertex set induces a connected subgraph."""
        vs = set(vs)
        if not vs:
            return False
        start = next(iter(vs))
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self._adj[x]:
                if y in vs and y not in comp:
                    comp.add(y)
                    stack.append(y)
        return comp == vs

    # -- conversions -------------------------------------------------------

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self._vertices)
        g.add_edges_from(self._edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        return cls(g.nodes(), g.edges())

    # -- value semantics ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self):
        return hash((self._vertices, self._edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def fresh_vertices(g: Graph, count: int, prefix: str = "w") -> tuple:
    """Mint `count` new string ids not present in `g` (nor clashing with each other)."""
    out = []
    i = 0
    while len(out) < count:
        cand = f"~{prefix}{i}"
        if not g.has_vertex(cand):
            out.append(cand)
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class RootedInstance:
    """A graph with four distinct nominated vertices.

    The decision problem is symmetric in the nominated set, but the tuple
    order is kept (it fixes reading order in traces and certificates).
    """

    graph: Graph
    roots: tuple

    def __post_init__(self):
        if len(self.roots) != 4 or len(set(self.roots)) != 4:
            raise ValueError(f"need 4 distinct roots, got {self.roots!r}")
        missing = [r for r in self.roots if not self.graph.has_vertex(r)]
        if missing:
            raise ValueError(f"roots not in graph: {missing!r}")

    @property
    def root_set(self) -> frozenset:
        return frozenset(self.roots)


@dataclass(frozen=True)
class Separation:
    """A separation of a rooted instance, canonically oriented.

    ``left`` and ``right`` are the full vertex sets of the two sides;
    ``separator`` is their intersection.  Root counts are inclusive: a
    root inside the separator is counted on both sides, so the counts
    always sum to at least four.
    """

    left: frozenset
    right: frozenset
    separator: frozenset
    order: int
    root_split: tuple

    def left_lobe(self, g: Graph) -> Graph:
        return g.induced(self.left)

    def right_lobe(self, g: Graph) -> Graph:
        return g.induced(self.right)


def make_separation(inst: RootedInstance, left: Iterable, right: Iterable) -> Separation:
    """Build a canonically-oriented Separation and check its invariants."""
    g = inst.graph
    left = frozenset(left)
    right = frozenset(right)
    if left | right != g.vertex_set():
        raise ValueError("sides do not cover the graph")
    if left <= right or right <= left:
        raise ValueError("one side contains the other")
    sep = left & right
    for u, v in g.edges:
        if not ((u in left and v in left) or (u in right and v in right)):
            raise ValueError(f"edge {u!r}-{v!r} crosses the separation")
    roots = inst.root_set
    s = len(roots & left)
    t = len(roots & right)
    # Canonical orientation: fewer roots on the left; break ties by the
    # sorted vertex tuples so equal inputs always orient the same way.
    if (s, svert(left)) > (t, svert(right)):
        left, right = right, left
        s, t = t, s
    return Separation(left=left, right=right, separator=sep, order=len(sep), root_split=(s, t))


def enumerate_separations(inst: RootedInstance, max_order: int = 3) -> tuple:
    """All separations of order <= max_order, each unordered pair emitted once.

    Sorted by (order ascending, root imbalance descending), then by a
    deterministic structural key.
    """
    if max_order > 3:
        raise ValueError("separations of order > 3 are never needed here")
    g = inst.graph
    verts = g.vertices
    out = []
    for size in range(0, max_order + 1):
        for s_tuple in itertools.combinations(verts, size):
            s_set = set(s_tuple)
            comps = g.components_without(s_set)
            if len(comps) < 2:
                continue
            # Bipartition the components; fix the first component on the
            # left so each unordered pair appears exactly once.
            others = comps[1:]
            for r in range(0, len(others)):
                for extra in itertools.combinations(others, r):
                    left_comps = (comps[0],) + extra
                    if len(left_comps) == len(comps):
                        continue
                    left = s_set.union(*[set(c) for c in left_comps])
                    right = (set(verts) - left) | s_set
                    out.append(make_separation(inst, left, right))
    out.sort(
        key=lambda sp: (
            sp.order,
            -abs(sp.root_split[0] - sp.root_split[1]),
            tuple(map(vkey, svert(sp.separator))),
            tuple(map(vkey, svert(sp.left))),
        )
    )
    return tuple(out)


def contract_edge(g: Graph, u, v) -> Graph:
    """Contract edge uv; the first-named endpoint u survives. Simplifies."""
    if not g.has_edge(u, v):
        raise ValueError(f"cannot contract non-edge {u!r}-{v!r}")
    edges = []
    for x, y in g.edges:
        x2 = u if x == v else x
        y2 = u if y == v else y
        if x2 != y2:
            edges.append((x2, y2))
    return Graph((x for x in g.vertices if x != v), edges)


def find_cycle_through(g: Graph, targets: Iterable) -> Optional[tuple]:
    """Find a simple cycle through all of `targets` (3 or 4 vertices).

    Returns the cycle as a vertex tuple (no repeated endpoint) or None.
    DFS over simple paths anchored at the smallest target, pruned by
    reachability of the missing targets and of the anchor.
    """
    targets = svert(set(targets))
    if len(targets) not in (3, 4):
        raise ValueError("need 3 or 4 target vertices")
    if any(not g.has_vertex(t) for t in targets):
        raise ValueError("target not in graph")
    start = targets[0]
    need = set(targets[1:])

    def reachable(src: set, blocked: set) -> set:
        seen = set(src)
        stack = list(src)
        while stack:
            x = stack.pop()
            for y in g.neighbors(x):
                if y not in seen and y not in blocked:
                    seen.add(y)
                    stack.append(y)
        return seen

    path = [start]
    on_path = {start}

    def extend() -> Optional[tuple]:
        cur = path[-1]
        if len(path) >= 3 and not (need - on_path) and g.has_edge(cur, start):
            return tuple(path)
        # Prune: every missing target, and the anchor (which closes the
        # cycle), must be reachable from the current endpoint once the
        # interior of the path is blocked.
        blocked = on_path - {cur, start}
        seen = reachable({cur}, blocked)
        if start not in seen or (need - on_path) - seen:
            return None
        for y in g.neighbors(cur):
            if y in on_path:
                continue
            path.append(y)
            on_path.add(y)
            got = extend()
            if got is not None:
                return got
            path.pop()
            on_path.remove(y)
        return None

    return extend()


def menger_fan(g: Graph, v, attach: Iterable) -> tuple:
    """Three paths from v to the vertex set `attach`, pairwise meeting only
    at v, each meeting `attach` exactly once (at its far endpoint).

    Requires the paths to exist (the caller guarantees 3-connectivity).
    Returns the paths sorted by their far endpoints.
    """
    attach = svert(set(attach))
    if not g.has_vertex(v) or any(not g.has_vertex(c) for c in attach):
        raise ValueError("fan endpoints must lie in the graph")
    if v in set(attach):
        raise ValueError("v must not lie on the attachment set")
    aux = nx.Graph()
    aux.add_nodes_from(g.vertices)
    aux.add_edges_from(g.edges)
    sink = "~sink"
    while aux.has_node(sink):
        sink = "~" + sink
    aux.add_node(sink)
    for c in attach:
        aux.add_edge(c, sink)
    raw = list(nx.node_disjoint_paths(aux, v, sink))
    paths = []
    aset = set(attach)
    for p in raw:
        trimmed = []
        for x in p:
            trimmed.append(x)
            if x in aset:
                break
        paths.append(tuple(trimmed))
    paths.sort(key=lambda p: vkey(p[-1]))
    if len(paths) < 3:
        raise ValueError("fewer than three disjoint paths to the attachment set")
    return tuple(paths[:3])


# -- planar embeddings ----------------------------------------------------


def canonical_cycle(seq: Sequence) -> tuple:
    """Canonical rotation of a cyclic sequence (direction preserved)."""
    seq = tuple(seq)
    if not seq:
        return seq
    best = None
    for i in range(len(seq)):
        cand = seq[i:] + seq[:i]
        key = tuple(map(vkey, cand))
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def _faces_from_rotation(rotation: Mapping) -> tuple:
    """Face walks of a rotation system.

    Half-edge (u, v) continues with (v, w) where w precedes u in the
    rotation at v; every half-edge lies on exactly one face walk.
    """
    faces = []
    seen = set()
    for u in sorted(rotation, key=vkey):
        for v in rotation[u]:
            if (u, v) in seen:
                continue
            walk = []
            x, y = u, v
            while (x, y) not in seen:
                seen.add((x, y))
                walk.append(x)
                rot = rotation[y]
                w = rot[(rot.index(x) - 1) % len(rot)]
                x, y = y, w
            faces.append(canonical_cycle(walk))
    return tuple(faces)


@dataclass(frozen=True)
class PlanarEmbedding:
    """A rotation system with its face list and a designated outer face.

    `rotation` maps each vertex to the cyclic order of its neighbours;
    `faces` are the closed walks induced by the rotation (canonically
    rotated); `outer_face` is one of them.
    """

    rotation: Mapping
    faces: tuple
    outer_face: tuple

    def validate(self, g: Graph) -> tuple:
        """Check internal consistency against `g`. Returns (ok, reason)."""
        if svert(self.rotation) != g.vertices:
            return False, "rotation-keys"
        for v in g.vertices:
            if svert(self.rotation[v]) != g.neighbors(v):
                return False, "rotation-neighbours"
            if len(set(self.rotation[v])) != len(self.rotation[v]):
                return False, "rotation-duplicates"
        derived = _faces_from_rotation(self.rotation)
        if sorted(derived, key=lambda f: tuple(map(vkey, f))) != sorted(
            self.faces, key=lambda f: tuple(map(vkey, f))
        ):
            return False, "faces-mismatch"
        if self.outer_face not in self.faces:
            return False, "outer-face"
        if g.n >= 1 and g.is_connected():
            if g.n - g.m + len(self.faces) != 2:
                return False, "euler"
        # Every undirected edge appears exactly twice over all face walks.
        count: dict = {}
        for f in self.faces:
            for i, x in enumerate(f):
                y = f[(i + 1) % len(f)]
                count[frozenset((x, y))] = count.get(frozenset((x, y)), 0) + 1
        if count != {frozenset(e): 2 for e in g.edges}:
            return False, "edge-face-count"
        return True, "ok"

    def face_sets(self) -> tuple:
        return tuple(frozenset(f) for f in self.faces)


def planar_embed(g: Graph) -> Optional[PlanarEmbedding]:
    """A planar embedding of `g`, or None if `g` is not planar.

    The rotation comes from networkx's planarity test; the outer face is
    a deterministic default (longest face, ties broken lexicographically)
    and callers needing a specific outer face re-select it.  Face walks
    are traced along half-edges, so the graph must have at least one edge.
    """
    if g.m == 0:
        raise ValueError("graph has no edges, so no face structure exists")
    ok, emb = nx.check_planarity(g.to_networkx())
    if not ok:
        return None
    rotation = {}
    for v in g.vertices:
        if g.degree(v) == 0:
            rotation[v] = ()
        else:
            rotation[v] = tuple(emb.neighbors_cw_order(v))
    faces = _faces_from_rotation(rotation)
    outer = max(faces, key=lambda f: (len(f), tuple(map(vkey, f))))
    return PlanarEmbedding(rotation=rotation, faces=faces, outer_face=outer)


def reembed_with_outer(emb: PlanarEmbedding, face: tuple) -> PlanarEmbedding:
    """The same embedding with a different designated outer face."""
    face = canonical_cycle(face)
    if face not in emb.faces:
        raise ValueError("not a face of this embedding")
    return PlanarEmbedding(rotation=emb.rotation, faces=emb.faces, outer_face=face)


# -- connectivity --------------------------------------------------------


def connectivity(g: Graph) -> int:
    """Vertex connectivity (0 for disconnected or trivial graphs)."""
    if g.n <= 1:
        return 0
    return nx.node_connectivity(g.to_networkx())


def cut_vertices(g: Graph) -> tuple:
    return svert(nx.articulation_points(g.to_networkx()))


def is_k_connected(g: Graph, k: int) -> bool:
    """k-connected in the strict sense: more than k vertices and no
    separating set of fewer than k vertices."""
    if k <= 0:
        return g.n >= 1
    return g.n > k and connectivity(g) >= k
