"""The certificate-producing decision procedure for rooted K4-minors.

`decide` drives a separation case machine: it peels off small separators
(orders 0 to 3) with recipes that either lift a witness found on a smaller
instance or assemble an obstruction certificate by surgery, and hands
3-connected remainders to the cycle-and-linkage fast path.  Every decision
is re-verified against the original instance before being returned, so a
bug surfaces as an internal error rather than a wrong answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import networkx as nx

from .graph_core import (
    Graph,
    RootedInstance,
    Separation,
    contract_edge,
    cut_vertices,
    find_cycle_through,
    fresh_vertices,
    is_k_connected,
    make_separation,
    menger_fan,
    planar_embed,
    skey,
    svert,
    vkey,
)
from .linkage import Linkage, find_linkage, verify_linkage
from .minors import K3Certificate, MinorWitness, rooted_k3, verify_witness
from .obstructions import (
    Obstruction,
    PlusGraph,
    attach_clique,
    build_class,
    classify_vertex,
    cofacial_obstruction,
    ensure_edge_in_triangle,
    ensure_triangle_at,
    graft_pendant_root,
    insert_outerface_vertex,
    join_at_cut_pair,
    rename_vertex,
    replace_type3,
    triangles_of,
    verify_obstruction,
    VertexType,
)

__all__ = [
    "Decision",
    "ResourceLimitError",
    "decide",
    "cycle_linkage_to_minor",
    "decide_4connected",
    "decide_3connected",
    "decide_3connected_planar",
    "reduce_plus",
    "split_22_separation",
    "reduce_ear",
]

# Trace label appended when a case emits a certificate directly, without
# first searching for a witness (sound only because of the case ambient).
NO_WITNESS_ATTEMPT = "certificate-without-witness-attempt"


class ResourceLimitError(RuntimeError):
    """The recursion budget ran out; unreachable at desk scale (bug signal)."""


@dataclass(frozen=True)
class Decision:
    """Outcome of `decide`: a verified verdict with its audit trail.

    Exactly one of `witness` / `obstruction` is set, matching `verdict`
    ("YES" / "NO").  `trace` lists the case labels that were applied, outermost
    first; labels are stable strings versioned with the certificate schema.
    """

    verdict: str
    witness: Optional[MinorWitness]
    obstruction: Optional[Obstruction]
    trace: tuple

    @property
    def is_yes(self) -> bool:
        return self.verdict == "YES"


# ---------------------------------------------------------------------------
# Verification gates: every decision funnels through one of these.
# ---------------------------------------------------------------------------


def _yes(g: Graph, roots: Sequence, branch_map, trace) -> Decision:
    w = MinorWitness({r: frozenset(s) for r, s in dict(branch_map).items()})
    ok, why = verify_witness(g, roots, w)
    if not ok:
        raise AssertionError(f"internal error: constructed witness failed verification ({why})")
    return Decision("YES", w, None, tuple(trace))


def _no(g: Graph, roots: Sequence, ob: Obstruction, trace) -> Decision:
    ok, why = verify_obstruction(g, roots, ob)
    if not ok:
        raise AssertionError(f"internal error: constructed certificate failed verification ({why})")
    return Decision("NO", None, ob, tuple(trace))


def _rewrap(g: Graph, roots, dec: Decision, prefix: tuple) -> Decision:
    """Re-gate a decision from a helper under a longer trace."""
    if dec.is_yes:
        return _yes(g, roots, dec.witness.branch_sets, prefix + dec.trace)
    return _no(g, roots, dec.obstruction, prefix + dec.trace)


# ---------------------------------------------------------------------------
# Public entry point.
# ---------------------------------------------------------------------------


def decide(inst: RootedInstance) -> Decision:
    """Decide whether `inst.graph` has a K4-minor rooted at `inst.roots`.

    Returns a verified Decision; raises ValueError for invalid instances
    (already enforced by RootedInstance) and ResourceLimitError if the
    internal recursion budget is exhausted (a bug signal, not a real limit).
    """
    g = inst.graph
    budget = [8 * g.n * g.n * g.n + 256]
    return _decide(g, inst.roots, budget)


# ---------------------------------------------------------------------------
# The case machine.
# ---------------------------------------------------------------------------


def _decide(g: Graph, roots: tuple, budget: list) -> Decision:
    budget[0] -= 1
    if budget[0] < 0:
        raise ResourceLimitError("decide: recursion budget exhausted")

    rset = set(roots)

    # Base: the graph is exactly the four nominated vertices.
    if g.n == 4:
        return _base_four(g, roots)

    # Order 0: disconnected input.
    comps = sorted(g.components(), key=skey)
    if len(comps) > 1:
        return _order0(g, roots, comps, budget)

    # Order 1: cut vertices, by split type.
    dec = _order1(g, roots, budget)
    if dec is not None:
        return dec

    # Order 2, first four shapes: no-root lobes, then separators holding
    # one or two roots, then the two-two split.  The scan for two-vertex
    # cuts is shared across all five order-2 shapes.
    cuts2 = tuple(_two_cuts(g))
    dec = _order2_rootless(g, roots, budget, cuts2)
    if dec is not None:
        return dec
    dec = _order2_sep_one_root(g, roots, budget, cuts2)
    if dec is not None:
        return dec
    dec = _order2_sep_two_roots(g, roots, cuts2)
    if dec is not None:
        return dec
    dec = _order2_two_two(g, roots, budget, cuts2)
    if dec is not None:
        return dec

    # Order 3 with a rootless lobe of two or more inner vertices; must be
    # exhausted before the remaining order-2 shape, whose recipes assume it.
    dec = _order3_rootless(g, roots, budget)
    if dec is not None:
        return dec

    # Order 2, last shape: a lobe holding exactly one root.
    dec = _order2_one_three(g, roots, budget, cuts2)
    if dec is not None:
        return dec

    # Remainder: 3-connected (connected with no cut vertex by the order-0/1
    # stages, and cuts2 lists every two-vertex cut).
    if cuts2:
        raise AssertionError("internal error: separation case machine missed a small cut")
    core = _threeconn_core(g, roots)
    return _rewrap(g, roots, core, ("3con-fastpath",))


# -- base case --------------------------------------------------------------


def _base_four(g: Graph, roots: tuple) -> Decision:
    missing = [
        (x, y)
        for x, y in itertools.combinations(g.vertices, 2)
        if not g.has_edge(x, y)
    ]
    if not missing:
        return _yes(g, roots, {r: {r} for r in roots}, ("base-4",))
    x, y = missing[0]
    p, q = (z for z in g.vertices if z not in (x, y))
    core = Graph(g.vertices, [(x, p), (p, y), (y, q), (q, x), (p, q)])
    ob = build_class("D", core=core, outer=(x, p, y, q))
    return _no(g, roots, ob, ("base-4",))


# -- order 0 ----------------------------------------------------------------


def _order0(g: Graph, roots: tuple, comps, budget) -> Decision:
    rset = set(roots)
    main = [K for K in comps if rset <= K]
    if main:
        sub = _decide(g.induced(main[0]), roots, budget)
        trace = ("order0-restrict",) + sub.trace
        if sub.is_yes:
            return _yes(g, roots, sub.witness.branch_sets, trace)
        ob, t = ensure_triangle_at(sub.obstruction, min(sub.obstruction.nominated, key=vkey))
        extra = g.vertex_set() - ob.plus.vertices()
        if extra:
            ob = attach_clique(ob, t, extra)
        return _no(g, roots, ob, trace)

    # Roots split over components: certify directly with a one-diagonal web
    # whose missing quad edge joins two roots in different components.
    a = roots[0]
    comp_of = {r: K for K in comps for r in (K & rset)}
    x = min((r for r in roots if comp_of[r] != comp_of[a]), key=vkey)
    y, z = sorted((r for r in roots if r not in (a, x)), key=vkey)
    core = Graph((a, y, x, z), [(a, y), (y, x), (x, z), (z, a), (y, z)])
    t_x, t_a = frozenset((x, y, z)), frozenset((a, y, z))
    cliques: dict = {}
    for K in comps:
        inner = K - rset
        if not inner:
            continue
        key = t_x if x in K else t_a
        cliques[key] = cliques.get(key, frozenset()) | inner
    ob = build_class("D", core=core, outer=(a, y, x, z), cliques=cliques)
    return _no(g, roots, ob, ("order0-split",))


# -- order 1 ----------------------------------------------------------------


def _cut_parts(g: Graph, u) -> list:
    return sorted(g.components_without([u]), key=skey)


def _order1(g: Graph, roots: tuple, budget) -> Optional[Decision]:
    rset = set(roots)
    cuts = cut_vertices(g)
    if not cuts:
        return None
    nonroot_cuts = [u for u in cuts if u not in rset]
    root_cuts = [u for u in cuts if u in rset]

    def shed_rootless(u, label):
        comps = _cut_parts(g, u)
        shed = [K for K in comps if not K & rset]
        if not shed:
            return None
        left = frozenset().union(*shed)
        sub = _decide(g.remove_vertices(left), roots, budget)
        trace = (label,) + sub.trace
        if sub.is_yes:
            return _yes(g, roots, sub.witness.branch_sets, trace)
        ob, t = ensure_triangle_at(sub.obstruction, u)
        return _no(g, roots, attach_clique(ob, t, left), trace)

    # rootless components hanging off a non-nominated cut vertex
    for u in nonroot_cuts:
        dec = shed_rootless(u, "order1-(0,4)")
        if dec is not None:
            return dec

    # one root alone beyond a non-nominated cut vertex
    for u in nonroot_cuts:
        comps = _cut_parts(g, u)
        lone_roots = sorted(
            (next(iter(K & rset)) for K in comps if len(K & rset) == 1), key=vkey
        )
        if not lone_roots:
            continue
        a = lone_roots[0]
        C = next(K for K in comps if a in K)
        roots2 = tuple(u if r == a else r for r in roots)
        sub = _decide(g.remove_vertices(C), roots2, budget)
        trace = ("order1-(1,3)",) + sub.trace
        if sub.is_yes:
            bm = dict(sub.witness.branch_sets)
            bm[a] = bm.pop(u) | C
            return _yes(g, roots, bm, trace)
        ob, t = _regraft_sole_attachment(sub.obstruction, u, a)
        missing = g.vertex_set() - ob.plus.vertices()
        if missing:
            ob = attach_clique(ob, t, missing)
        return _no(g, roots, ob, trace)

    # two roots on each side of a non-nominated cut vertex
    for u in nonroot_cuts:
        comps = _cut_parts(g, u)
        if len(comps) == 2 and all(len(K & rset) == 2 for K in comps):
            r1, r2 = sorted(comps[0] & rset, key=vkey)
            r3, r4 = sorted(comps[1] & rset, key=vkey)
            quad = (r1, r2, r3, r4)
            core = Graph(
                (r1, r2, r3, r4, u),
                [(r1, r2), (r2, r3), (r3, r4), (r4, r1)] + [(u, r) for r in quad],
            )
            cliques = {}
            if comps[0] - {r1, r2}:
                cliques[frozenset((r1, r2, u))] = frozenset(comps[0] - {r1, r2})
            if comps[1] - {r3, r4}:
                cliques[frozenset((r3, r4, u))] = frozenset(comps[1] - {r3, r4})
            ob = build_class("D", core=core, outer=quad, cliques=cliques)
            return _no(g, roots, ob, ("order1-(2,2)",))

    # rootless components hanging off a nominated cut vertex
    for u in root_cuts:
        dec = shed_rootless(u, "order1-(1,4)")
        if dec is not None:
            return dec

    # a nominated cut vertex with one root alone on one side
    for b in root_cuts:
        comps = _cut_parts(g, b)
        lone_roots = sorted(
            (next(iter(K & rset)) for K in comps if len(K & rset) == 1), key=vkey
        )
        if not lone_roots:
            raise AssertionError("internal error: nominated cut vertex without a lone root side")
        a = lone_roots[0]
        C = next(K for K in comps if a in K)
        c, d = sorted((r for r in roots if r not in (a, b)), key=vkey)
        core = Graph((a, b, c, d), [(a, b), (b, d), (d, c), (c, a), (b, c)])
        cliques = {}
        if C - {a}:
            cliques[frozenset((a, b, c))] = frozenset(C - {a})
        rest = g.vertex_set() - C - {a, b, c, d}
        if rest:
            cliques[frozenset((b, c, d))] = frozenset(rest)
        ob = build_class("D", core=core, outer=(a, b, d, c), cliques=cliques)
        return _no(g, roots, ob, ("order1-(2,3)", NO_WITNESS_ATTEMPT))

    return None


def _regraft_sole_attachment(ob: Obstruction, u, new_root) -> tuple:
    """Move u's nomination to the fresh vertex `new_root` when the lobe that
    holds `new_root` attaches at u alone; dispatch on u's vertex type."""
    kind = classify_vertex(ob, u)
    if kind is VertexType.TYPE3:
        return replace_type3(ob, u, new_root)
    if kind is VertexType.TYPE1:
        return insert_outerface_vertex(ob, u, new_root)
    b = min((x for x in ob.nominated if x != u), key=vkey)
    return graft_pendant_root(ob, u, b, new_root)


# -- order 2 ----------------------------------------------------------------


def _two_cuts(g: Graph):
    for u, v in itertools.combinations(g.vertices, 2):
        comps = g.components_without((u, v))
        if len(comps) >= 2:
            yield (u, v), sorted(comps, key=skey)


def _order2_rootless(g: Graph, roots: tuple, budget, cuts2) -> Optional[Decision]:
    rset = set(roots)
    for (u, v), comps in cuts2:
        shed = [K for K in comps if not K & rset]
        if not shed:
            continue
        C = shed[0]
        g2 = g.remove_vertices(C)
        if not g.has_edge(u, v):
            g2 = g2.add_edges([(u, v)])
        sub = _decide(g2, roots, budget)
        trace = ("order2-rootless",) + sub.trace
        if sub.is_yes:
            bm = {r: set(s) for r, s in sub.witness.branch_sets.items()}
            ok, _ = verify_witness(g, roots, sub.witness)
            if not ok:
                # the added uv edge was load-bearing; the shed lobe joins u
                # to v, so adding it to u's branch repairs both uses
                ru = next((r for r in roots if u in bm[r]), None)
                rv = next((r for r in roots if v in bm[r]), None)
                if ru is None or rv is None:
                    raise AssertionError("internal error: unusable witness after lobe removal")
                bm[ru] |= C
            return _yes(g, roots, bm, trace)
        ob, t = ensure_edge_in_triangle(sub.obstruction, u, v)
        return _no(g, roots, attach_clique(ob, t, C), trace)
    return None


def _order2_sep_one_root(g: Graph, roots: tuple, budget, cuts2) -> Optional[Decision]:
    rset = set(roots)
    for (u, v), comps in cuts2:
        sep_roots = [x for x in (u, v) if x in rset]
        if len(sep_roots) != 1:
            continue
        b = sep_roots[0]
        w = v if u == b else u
        lone_roots = sorted(
            (next(iter(K & rset)) for K in comps if len(K & rset) == 1), key=vkey
        )
        if not lone_roots:
            raise AssertionError("internal error: one-root separator without a lone root side")
        a = lone_roots[0]
        C = next(K for K in comps if a in K)
        g2 = g.remove_vertices(C)
        if not g.has_edge(w, b):
            g2 = g2.add_edges([(w, b)])
        roots2 = tuple(w if r == a else r for r in roots)
        sub = _decide(g2, roots2, budget)
        trace = ("order2-(2,3)",) + sub.trace
        if sub.is_yes:
            # the shed lobe meets both separator vertices, so it restores
            # any use of an added wb edge once it joins w's branch
            bm = dict(sub.witness.branch_sets)
            bm[a] = bm.pop(w) | C
            return _yes(g, roots, bm, trace)
        ob, t = graft_pendant_root(sub.obstruction, w, b, a)
        missing = g.vertex_set() - ob.plus.vertices()
        if missing:
            ob = attach_clique(ob, t, missing)
        return _no(g, roots, ob, trace)
    return None


def _order2_sep_two_roots(g: Graph, roots: tuple, cuts2) -> Optional[Decision]:
    rset = set(roots)
    for (x, y), comps in cuts2:
        if x not in rset or y not in rset:
            continue
        if len(comps) != 2 or any(len(K & rset) != 1 for K in comps):
            raise AssertionError("internal error: unexpected shape at a two-root separator")
        p = next(iter(comps[0] & rset))
        q = next(iter(comps[1] & rset))
        core = Graph((p, x, q, y), [(p, x), (x, q), (q, y), (y, p), (x, y)])
        cliques = {}
        if comps[0] - {p}:
            cliques[frozenset((p, x, y))] = frozenset(comps[0] - {p})
        if comps[1] - {q}:
            cliques[frozenset((q, x, y))] = frozenset(comps[1] - {q})
        ob = build_class("D", core=core, outer=(p, x, q, y), cliques=cliques)
        return _no(g, roots, ob, ("order2-(3,3)", NO_WITNESS_ATTEMPT))
    return None


def _order2_two_two(g: Graph, roots: tuple, budget, cuts2) -> Optional[Decision]:
    rset = set(roots)
    inst = RootedInstance(g, tuple(roots))
    for (u, v), comps in cuts2:
        if u in rset or v in rset:
            continue
        counts = [len(K & rset) for K in comps]
        if max(counts) > 2:
            continue  # a three-root lobe: handled by the last order-2 shape
        if counts[0] == 2:
            left_comps = [comps[0]]
        else:
            ones = [K for K in comps if len(K & rset) == 1]
            left_comps = ones[:2]
        left = frozenset((u, v)).union(*left_comps)
        right = (g.vertex_set() - left) | {u, v}
        sep = make_separation(inst, left, right)
        inst1, inst2 = split_22_separation(inst, sep)
        a, b = inst1.roots[:2]
        c, d = inst2.roots[2:]
        uu, vv = inst1.roots[2:]

        side1 = inst1.graph.vertex_set() - {uu, vv}
        side2 = inst2.graph.vertex_set() - {uu, vv}

        sub1 = _decide(inst1.graph, inst1.roots, budget)
        if sub1.is_yes:
            bm = _lift_two_two(g, sub1.witness, (a, b), (c, d), side2, uu, vv)
            return _yes(g, roots, bm, ("order2-(2,2)-left",) + sub1.trace)
        sub2 = _decide(inst2.graph, inst2.roots, budget)
        if sub2.is_yes:
            bm = _lift_two_two(g, sub2.witness, (c, d), (a, b), side1, uu, vv)
            return _yes(g, roots, bm, ("order2-(2,2)-right",) + sub2.trace)
        ob = join_at_cut_pair(
            sub1.obstruction, sub2.obstruction, uu, vv, graph=g, roots=roots
        )
        return _no(g, roots, ob, ("order2-(2,2)-join",) + sub1.trace + sub2.trace)
    return None


def _lift_two_two(g: Graph, w_sub: MinorWitness, kept, lifted, other_side, u, v) -> dict:
    """Extend a side witness across a two-vertex cut.

    `w_sub` decides the kept side plus the cut pair; the two `lifted` roots
    live in `other_side` (that side without the cut pair).  Route disjoint
    paths from them to the cut pair, grow the path starts into a connected
    partition of the far side, and append each part to the branch of its
    landing port.
    """
    aux = g.induced(other_side | {u, v}).to_networkx()
    source, sink = "~source", "~sink"
    aux.add_node(source)
    aux.add_node(sink)
    for r in lifted:
        aux.add_edge(source, r)
    for z in (u, v):
        aux.add_edge(z, sink)
    paths = list(nx.node_disjoint_paths(aux, source, sink))
    if len(paths) < 2:
        raise AssertionError("internal error: missing disjoint paths across a 2-cut")
    grow = {}
    port = {}
    for p in paths[:2]:
        body = p[1:-1]
        start, end = body[0], body[-1]
        if start not in lifted or end not in (u, v):
            raise AssertionError("internal error: malformed path across a 2-cut")
        grow[start] = set(body) - {end}
        port[start] = end
    leftover = set(other_side) - grow[lifted[0]] - grow[lifted[1]]
    while leftover:
        moved = False
        for z in sorted(leftover, key=vkey):
            for r in lifted:
                if any(g.has_edge(z, t) for t in grow[r]):
                    grow[r].add(z)
                    leftover.discard(z)
                    moved = True
                    break
            if moved:
                break
        if not moved:
            raise AssertionError("internal error: stranded vertices beside a 2-cut")
    bm = {r: set(w_sub.branch_sets[r]) for r in kept}
    for r in lifted:
        bm[r] = grow[r] | set(w_sub.branch_sets[port[r]])
    return bm


# -- order 3, rootless lobe -------------------------------------------------


def _order3_rootless(g: Graph, roots: tuple, budget) -> Optional[Decision]:
    rset = set(roots)
    for u, v, w in itertools.combinations(g.vertices, 3):
        comps = sorted(g.components_without((u, v, w)), key=skey)
        if len(comps) < 2:
            continue
        shed = [K for K in comps if not K & rset and len(K) >= 2]
        if not shed:
            continue
        C = shed[0]
        lobe = g.induced(C | {u, v, w})
        k3 = rooted_k3(lobe, u, v, w)
        if isinstance(k3, K3Certificate):
            raise AssertionError("internal error: rootless lobe at a 3-cut with no triangle minor")
        tri = [(u, v), (u, w), (v, w)]
        g2 = g.remove_vertices(C).add_edges([e for e in tri if not g.has_edge(*e)])
        sub = _decide(g2, roots, budget)
        trace = ("order3-rootless",) + sub.trace
        if sub.is_yes:
            bm = {}
            for r, S in sub.witness.branch_sets.items():
                grown = set(S)
                for x in (u, v, w):
                    if x in S:
                        grown |= k3.branch_sets[x]
                bm[r] = grown
            return _yes(g, roots, bm, trace)
        ob = sub.obstruction
        t = next(
            (t for t in triangles_of(ob.base) if {u, v, w} <= ob.plus.region(t)),
            None,
        )
        if t is None:
            raise AssertionError("internal error: separator triangle not in one clique region")
        return _no(g, roots, attach_clique(ob, t, C), trace)
    return None


# -- order 2, one root beyond the cut ---------------------------------------


def _order2_one_three(g: Graph, roots: tuple, budget, cuts2) -> Optional[Decision]:
    rset = set(roots)
    found = []
    for (u, v), comps in cuts2:
        if u in rset or v in rset:
            raise AssertionError("internal error: nominated separator survived earlier cases")
        if len(comps) != 2:
            raise AssertionError("internal error: unexpected component count at a late 2-cut")
        ones = [K for K in comps if len(K & rset) == 1]
        if len(ones) != 1:
            raise AssertionError("internal error: unexpected root split at a late 2-cut")
        C = ones[0]
        a = next(iter(C & rset))
        found.append(((u, v), C, a))
    if not found:
        return None
    for (u, v), C, a in found:
        if len(C) >= 2 or not g.has_edge(u, v):
            return _one_three_general(g, roots, (u, v), C, a, budget)
    (u, v), C, a = found[0]
    return _one_three_ear(g, roots, (u, v), a, budget)


def _one_three_general(g, roots, pair, C, a, budget) -> Decision:
    """A lobe with one root, bigger than a triangle: replace it by a fresh
    degree-2 stand-in beside the (possibly added) separator edge."""
    u, v = pair
    stand_in = fresh_vertices(g, 1, prefix="r")[0]
    g2 = g.remove_vertices(C).add_vertices([stand_in]).add_edges(
        [(stand_in, u), (stand_in, v)] + ([] if g.has_edge(u, v) else [(u, v)])
    )
    roots2 = tuple(stand_in if r == a else r for r in roots)
    sub = _decide(g2, roots2, budget)
    trace = ("sep(1,3)-order2",) + sub.trace
    lobe = C | {u, v}
    if sub.is_yes:
        branch = set(sub.witness.branch_sets[stand_in])
        if not branch & {u, v}:
            raise AssertionError("internal error: stand-in branch misses both cut vertices")
        s_out = {u, v} - branch
        bm = {r: set(s) for r, s in sub.witness.branch_sets.items() if r != stand_in}
        bm[a] = (branch - {stand_in}) | (lobe - s_out)
        return _yes(g, roots, bm, trace)
    ob = sub.obstruction
    t = next(
        (
            t
            for t in triangles_of(ob.base)
            if stand_in in t and {u, v} <= ob.plus.region(t)
        ),
        None,
    )
    if t is None:
        raise AssertionError("internal error: stand-in not in a region with both cut vertices")
    ob = rename_vertex(ob, stand_in, a)
    t = frozenset(a if z == stand_in else z for z in t)
    missing = g.vertex_set() - ob.plus.vertices()
    if missing:
        ob = attach_clique(ob, t, missing)
    return _no(g, roots, ob, trace)


def _one_three_ear(g, roots, pair, a, budget) -> Decision:
    """Every remaining 2-cut carries a triangle ear {a, u, v} with `a` a
    degree-2 root: decide with u standing in for a, then finish on the
    certificate's embedding or on the ear-free core."""
    u, v = pair
    rset = set(roots)
    g_u = g.remove_vertices([a])
    roots2 = tuple(u if r == a else r for r in roots)
    sub = _decide(g_u, roots2, budget)
    trace = ("sep(1,3)-order2-ear",) + sub.trace
    if sub.is_yes:
        bm = dict(sub.witness.branch_sets)
        bm[a] = bm.pop(u) | {a}
        return _yes(g, roots, bm, trace)

    ob = sub.obstruction
    if ob.klass != "D":
        raise AssertionError("internal error: ear endgame expects a web certificate")

    # Flatten singleton cliques into the drawing, restrict its face system
    # to the stand-in graph, then try to re-insert the ear so that all four
    # roots share a face, which completes to a web certificate.
    flat, faces = _flatten_web(ob)
    faces = _restrict_faces(flat, faces, g_u)
    for f in sorted((f for f in faces if u in f and v in f), key=skey):
        for candidate in _insert_ear(faces, f, u, v, a):
            root_face = next(
                (fw for fw in sorted(candidate, key=skey) if rset <= set(fw)), None
            )
            if root_face is None:
                continue
            done = cofacial_obstruction(g, candidate, root_face, roots)
            if done is not None:
                ok, _ = verify_obstruction(g, roots, done)
                if ok:
                    return _no(g, roots, done, trace + ("ear-cofacial-completion",))

    # No cofacial drawing: delete every degree-2 root, mapping each to a
    # private neighbour, and read a witness off the 3-connected core.
    S = [r for r in roots if g.degree(r) == 2]
    if a not in S:
        raise AssertionError("internal error: ear root is not degree-2")
    others = [r for r in roots if r != a]
    keepers = {r for r in others if r not in S}
    rep = {r: r for r in keepers}
    taken = {v} | keepers
    for x in sorted((r for r in others if r in S), key=vkey):
        cand = next(
            (
                t
                for t in sorted(g.neighbors(x), key=lambda t: (t in rset, vkey(t)))
                if t not in taken and t not in S
            ),
            None,
        )
        if cand is None:
            raise AssertionError("internal error: no private neighbour for a degree-2 root")
        rep[x] = cand
        taken.add(cand)
    g_star = g.remove_vertices(S)
    roots_star = (v,) + tuple(rep[r] for r in others)
    if len(set(roots_star)) != 4:
        raise AssertionError("internal error: degree-2 root representatives collide")
    if not is_k_connected(g_star, 3):
        raise AssertionError("internal error: ear-free core is not 3-connected")
    if planar_embed(g_star) is None:
        raise AssertionError("internal error: ear-free core is not planar")
    core_dec = _threeconn_core(g_star, roots_star)
    if not core_dec.is_yes:
        raise AssertionError("internal error: ear-free core unexpectedly has no minor")
    w_star = core_dec.witness.branch_sets
    bm = {a: set(w_star[v]) | {a}}
    for x in others:
        bm[x] = set(w_star[rep[x]]) | ({x} if x in S else set())
    return _yes(g, roots, bm, trace + ("ear-deg2-deletion",))


# -- combinatorial face plumbing for the ear endgame -------------------------


def _flatten_web(ob: Obstruction) -> tuple:
    """Push every singleton clique vertex into its triangle's face.

    Returns the flattened planar graph and its face walks.  Cliques with two
    or more vertices cannot occur here (their region would be a rootless
    lobe at a 3-cut, peeled earlier).
    """
    base = ob.base
    faces = list(ob.embedding.faces)
    for t, xs in sorted(ob.plus.cliques.items(), key=lambda kv: svert(kv[0])):
        if not xs:
            continue
        if len(xs) >= 2:
            raise AssertionError("internal error: thick clique survived into the ear endgame")
        w = next(iter(xs))
        face = next((f for f in faces if len(f) == 3 and frozenset(f) == t), None)
        if face is None:
            raise AssertionError("internal error: clique triangle is not a face")
        faces.remove(face)
        t1, t2, t3 = face
        faces += [(t1, t2, w), (t2, t3, w), (t3, t1, w)]
        base = base.add_vertices([w]).add_edges([(w, t1), (w, t2), (w, t3)])
    return base, faces


def _rotate_to_edge(face: tuple, x, y) -> tuple:
    k = len(face)
    for i in range(k):
        if face[i] == x and face[(i + 1) % k] == y:
            return face[i:] + face[:i]
    raise AssertionError("internal error: directed edge not on this face walk")


def _restrict_faces(h: Graph, faces, target: Graph) -> list:
    """Drop the edges of `h` missing from `target`, merging faces pairwise.

    Valid while every intermediate graph stays 2-connected (true here: the
    target is a spanning 2-connected subgraph), so no deleted edge is a
    bridge and the two incident faces are always distinct.
    """
    faces = list(faces)
    for e in sorted(h.edge_set() - target.edge_set(), key=skey):
        x, y = svert(e)
        i1 = next(i for i, f in enumerate(faces) if _has_arc(f, x, y))
        i2 = next(i for i, f in enumerate(faces) if _has_arc(f, y, x))
        if i1 == i2:
            raise AssertionError("internal error: bridge while restricting a face system")
        f1 = _rotate_to_edge(faces[i1], x, y)
        f2 = _rotate_to_edge(faces[i2], y, x)
        merged = (x,) + f2[2:] + (y,) + f1[2:]
        if len(set(merged)) != len(merged):
            raise AssertionError("internal error: non-simple face after edge removal")
        faces = [f for i, f in enumerate(faces) if i not in (i1, i2)] + [merged]
    return faces


def _has_arc(face: tuple, x, y) -> bool:
    k = len(face)
    return any(face[i] == x and face[(i + 1) % k] == y for i in range(k))


def _insert_ear(faces, host: tuple, u, v, a):
    """Face systems obtained by drawing `a` inside `host` joined to u and v."""
    rest = [f for f in faces if f != host]
    i = host.index(u)
    fr = host[i:] + host[:i]
    k = fr.index(v)
    first = fr[: k + 1] + (a,)
    second = fr[k:] + (u, a)
    yield rest + [first, second]


# -- 3-connected fast path ---------------------------------------------------


def _threeconn_core(g: Graph, roots: tuple) -> Decision:
    """Dichotomy for 3-connected graphs: planar-cofacial completion, the
    cycle-plus-linkage route, or the three-path fan witness."""
    rset = set(roots)
    emb = planar_embed(g)
    if emb is not None:
        face = next(
            (f for f in sorted(emb.faces, key=skey) if rset <= set(f)), None
        )
        if face is not None:
            ob = cofacial_obstruction(g, emb.faces, face, roots)
            if ob is None:
                raise AssertionError("internal error: cofacial instance failed to complete")
            return _no(g, roots, ob, ("3con-planar-coface",))

    cyc = find_cycle_through(g, roots)
    if cyc is not None:
        pos = {x: i for i, x in enumerate(cyc)}
        s0, s1, s2, s3 = sorted(roots, key=lambda r: pos[r])
        res = find_linkage(g, (s0, s2, s1, s3))
        if isinstance(res, Linkage):
            w = cycle_linkage_to_minor(g, cyc, res)
            return _yes(g, roots, w.branch_sets, ("cycle-linkage",))
        ob = build_class(
            "D", core=res.plus.base, outer=res.outer, cliques=dict(res.plus.cliques)
        )
        return _no(g, roots, ob, ("web-certificate",))

    return _fan_witness(g, roots)


def _fan_witness(g: Graph, roots: tuple) -> Decision:
    """Witness from a cycle through three roots plus three disjoint paths
    from the fourth; sound whenever no cycle collects all four roots."""
    d = roots[3]
    cyc = find_cycle_through(g, roots[:3])
    if cyc is None:
        raise AssertionError("internal error: no cycle through three roots in a 3-connected graph")
    if d in cyc:
        raise AssertionError("internal error: fourth root on the tricolour cycle")
    fan = menger_fan(g, d, cyc)

    i0 = cyc.index(roots[0])
    cyc = cyc[i0:] + cyc[:i0]
    k = len(cyc)
    pos = {x: i for i, x in enumerate(cyc)}
    t0, t1, t2 = sorted(roots[:3], key=lambda r: pos[r])
    p0, p1, p2 = pos[t0], pos[t1], pos[t2]

    def arc_of(i: int) -> int:
        if p0 < i < p1:
            return 0
        if p1 < i < p2:
            return 1
        if i > p2 or i < p0:
            return 2
        return -1  # a root position

    ends = {}
    for path in fan:
        e = path[-1]
        arc = arc_of(pos[e])
        if arc == -1 or arc in ends:
            raise AssertionError("internal error: fan endpoints are not spread over the arcs")
        ends[arc] = (e, path)

    def segment(start: int, stop: int) -> set:
        out, i = set(), start
        while True:
            out.add(cyc[i])
            if i == stop:
                return out
            i = (i + 1) % k

    e01, e12, e20 = ends[0][0], ends[1][0], ends[2][0]
    bm = {
        t0: segment((pos[e20] + 1) % k, pos[e01]),
        t1: segment((pos[e01] + 1) % k, pos[e12]),
        t2: segment((pos[e12] + 1) % k, pos[e20]),
        d: {d} | {x for _, path in ends.values() for x in path[1:-1]},
    }
    return _yes(g, roots, bm, ("tricolor-fan",))


# ---------------------------------------------------------------------------
# The constructive cycle-and-linkage reduction.
# ---------------------------------------------------------------------------


#: Steps consumed by the most recent cycle_linkage_to_minor call (test hook).
_LAST_REDUCTION_STEPS = [0]


def cycle_linkage_to_minor(g: Graph, cycle: Sequence, lk: Linkage) -> MinorWitness:
    """Build a rooted-minor witness from a cycle and a crossing linkage.

    The cycle must visit the linkage's four terminals in the interleaved
    order (path1 start, path2 start, path1 end, path2 end).  The witness is
    found by an iterative reduction: restrict to the cycle and paths, then
    contract degree-2 vertices, same-path neighbours on the cycle, and
    path-starts that stray onto their own half of the cycle; the irreducible
    configuration is labelled directly.  Each step removes a vertex or an
    edge, so the number of steps is at most |V| + |E|.
    """
    C = tuple(cycle)
    if len(C) < 4 or len(set(C)) != len(C):
        raise ValueError("cycle must be a simple cycle on at least four vertices")
    for i, x in enumerate(C):
        if not g.has_edge(x, C[(i + 1) % len(C)]):
            raise ValueError("cycle edge missing from the graph")
    P, Q = tuple(lk.path1), tuple(lk.path2)
    a, c = P[0], P[-1]
    b, d = Q[0], Q[-1]
    ok, why = verify_linkage(g, (a, c, b, d), lk)
    if not ok:
        raise ValueError(f"linkage does not verify: {why}")
    if any(r not in set(C) for r in (a, b, c, d)):
        raise ValueError("linkage terminal not on the cycle")
    C = _align_cycle(C, a, b, c, d, strict=True)

    roots = (a, b, c, d)
    rootset = set(roots)
    gr = g
    lifts = []
    steps = g.n + g.m + 4

    while True:
        steps -= 1
        if steps < 0:
            raise AssertionError("internal error: cycle reduction did not terminate")

        if set(gr.vertices) == rootset:
            for x, y in itertools.combinations(roots, 2):
                if not gr.has_edge(x, y):
                    raise AssertionError("internal error: reduced base is not complete")
            labels = {r: {r} for r in roots}
            break

        # restriction to the union of the cycle and the two paths
        keep_v = set(P) | set(Q) | set(C)
        drop_v = [x for x in gr.vertices if x not in keep_v]
        if drop_v:
            gr = gr.remove_vertices(drop_v)
            continue
        keep_e = set()
        for seq in (P, Q):
            keep_e |= {frozenset(e) for e in zip(seq, seq[1:])}
        keep_e |= {frozenset((C[i], C[(i + 1) % len(C)])) for i in range(len(C))}
        drop_e = sorted((e for e in gr.edge_set() if e not in keep_e), key=skey)
        if drop_e:
            x, y = svert(drop_e[0])
            gr = gr.remove_edge(x, y)
            continue

        # contract past degree-2 vertices, along the structure they lie on:
        # a vertex of P or Q merges with a neighbour on its own path (merging
        # into the other path would break linkage disjointness), anything
        # else is a cycle-only vertex and merges with either cycle neighbour
        low = next((x for x in gr.vertices if gr.degree(x) == 2), None)
        if low is not None:
            seq = P if low in set(P) else Q if low in set(Q) else None
            if seq is not None:
                i = seq.index(low)
                cands = [seq[j] for j in (i + 1, i - 1) if 0 <= j < len(seq)]
            else:
                cands = list(gr.neighbors(low))
            other = next(
                (w for w in cands if not (low in rootset and w in rootset)),
                None,
            )
            if other is None:
                raise AssertionError("internal error: degree-2 vertex wedged between roots")
            surv, gone = _survivor(low, other, rootset)
            gr = contract_edge(gr, surv, gone)
            P, Q = _merge_path(P, surv, gone), _merge_path(Q, surv, gone)
            C = _merge_cycle(C, surv, gone, rootset)
            C = _align_cycle(C, a, b, c, d, strict=False)
            lifts.append((surv, gone))
            continue

        # contract same-path neighbours on the cycle
        pset, qset = set(P), set(Q)
        k = len(C)
        pairs = sorted(
            (
                tuple(sorted((C[i], C[(i + 1) % k]), key=vkey))
                for i in range(k)
                if (C[i] in pset) == (C[(i + 1) % k] in pset)
            ),
            key=skey,
        )
        if pairs:
            x, y = pairs[0]
            surv, gone = _survivor(x, y, rootset)
            gr = contract_edge(gr, surv, gone)
            P, Q = _merge_path(P, surv, gone), _merge_path(Q, surv, gone)
            C = _merge_cycle(C, surv, gone, rootset)
            C = _align_cycle(C, a, b, c, d, strict=False)
            lifts.append((surv, gone))
            continue

        # colours now alternate and every vertex lies on the cycle
        posC = {x: i for i, x in enumerate(C)}
        pb, pc, pd = posC[b], posC[c], posC[d]
        if len(P) < 3 or len(Q) < 3:
            raise AssertionError("internal error: short path outside the base case")
        v, w = P[1], P[-2]
        iv, iw = posC[v], posC[w]

        # pull a's path-neighbour off a's half of the cycle
        if iv >= pd or iv <= pb:
            gr = contract_edge(gr, a, v)
            P = _merge_path(P, a, v)
            C = _merge_cycle(C, a, v, rootset)
            C = _align_cycle(C, a, b, c, d, strict=False)
            lifts.append((a, v))
            continue
        if pb <= iw <= pd:
            gr = contract_edge(gr, c, w)
            P = _merge_path(P, c, w)
            C = _merge_cycle(C, c, w, rootset)
            C = _align_cycle(C, a, b, c, d, strict=False)
            lifts.append((c, w))
            continue

        # irreducible: label the four branch sets directly
        x = C[iv + 1] if iv < pc else C[iv - 1]
        y = C[1] if 0 < iw < pb else C[-1]
        posQ = {z: i for i, z in enumerate(Q)}
        if x not in posQ or y not in posQ:
            raise AssertionError("internal error: cycle colours failed to alternate")
        ix, iy = posQ[x], posQ[y]
        if ix < iy:
            part_b, part_d = set(Q[:iy]), set(Q[iy:])
        else:
            part_b, part_d = set(Q[: iy + 1]), set(Q[iy + 1 :])
        labels = {a: {a, v}, c: set(P) - {a, v}, b: part_b, d: part_d}
        break

    _LAST_REDUCTION_STEPS[0] = g.n + g.m + 4 - steps
    bm = {r: set(s) for r, s in labels.items()}
    for surv, gone in reversed(lifts):
        holder = next((r for r in roots if surv in bm[r]), None)
        if holder is not None:
            bm[holder].add(gone)
    w = MinorWitness({r: frozenset(s) for r, s in bm.items()})
    ok, why = verify_witness(g, roots, w)
    if not ok:
        raise AssertionError(f"internal error: cycle reduction witness failed ({why})")
    return w


def _survivor(x, y, rootset) -> tuple:
    if x in rootset:
        return x, y
    if y in rootset:
        return y, x
    return tuple(sorted((x, y), key=vkey))


def _merge_path(seq: tuple, surv, gone) -> tuple:
    if gone not in seq:
        return seq
    if surv not in seq:
        return tuple(surv if z == gone else z for z in seq)
    i, j = seq.index(surv), seq.index(gone)
    lo, hi = min(i, j), max(i, j)
    return seq[:lo] + (surv,) + seq[hi + 1 :]


def _merge_cycle(C: tuple, surv, gone, rootset) -> tuple:
    if gone not in C:
        return C
    if surv not in C:
        return tuple(surv if z == gone else z for z in C)
    i = C.index(surv)
    rot = C[i:] + C[:i]
    j = rot.index(gone)
    if j == 1 or j == len(rot) - 1:
        return tuple(z for z in C if z != gone)
    cand1 = rot[:j]
    cand2 = (surv,) + rot[j + 1 :]
    keep = [cc for cc in (cand1, cand2) if rootset <= set(cc)]
    if len(keep) != 1:
        raise AssertionError("internal error: chord contraction lost the nominated cycle")
    return keep[0]


def _align_cycle(C: tuple, a, b, c, d, strict: bool) -> tuple:
    i = C.index(a)
    rot = C[i:] + C[:i]
    pos = {x: j for j, x in enumerate(rot)}
    if pos[b] < pos[c] < pos[d]:
        return rot
    rev = (rot[0],) + tuple(reversed(rot[1:]))
    pos = {x: j for j, x in enumerate(rev)}
    if pos[b] < pos[c] < pos[d]:
        return rev
    if strict:
        raise ValueError("cycle does not visit the linkage terminals in interleaved order")
    raise AssertionError("internal error: cycle lost the terminal order")


# ---------------------------------------------------------------------------
# Connectivity-gated entry points.
# ---------------------------------------------------------------------------


def decide_4connected(inst: RootedInstance) -> Decision:
    """Decide a 4-connected instance via the cycle-and-linkage route."""
    if not is_k_connected(inst.graph, 4):
        raise ValueError("decide_4connected: graph is not 4-connected")
    return _threeconn_core(inst.graph, inst.roots)


def decide_3connected(inst: RootedInstance) -> Decision:
    """Decide a 3-connected instance via the cycle, linkage, and fan routes."""
    if not is_k_connected(inst.graph, 3):
        raise ValueError("decide_3connected: graph is not 3-connected")
    return _threeconn_core(inst.graph, inst.roots)


def decide_3connected_planar(inst: RootedInstance) -> Decision:
    """Decide a 3-connected planar instance: NO exactly when the four roots
    share a face, with the certificate read off the completed drawing."""
    if not is_k_connected(inst.graph, 3):
        raise ValueError("decide_3connected_planar: graph is not 3-connected")
    if planar_embed(inst.graph) is None:
        raise ValueError("decide_3connected_planar: graph is not planar")
    return _threeconn_core(inst.graph, inst.roots)


# ---------------------------------------------------------------------------
# Reduction helpers shared with the test suite.
# ---------------------------------------------------------------------------


def reduce_plus(pg: PlusGraph, roots) -> Graph:
    """Strip the attached cliques: deciding the derived graph at `roots`
    is equivalent to deciding the base, and witnesses lift unchanged."""
    ok, why = pg.validate()
    if not ok:
        raise ValueError(f"reduce_plus: invalid plus graph ({why})")
    for r in roots:
        if pg.clique_of(r) is not None:
            raise ValueError("reduce_plus: a nominated vertex sits inside an attached clique")
        if not pg.base.has_vertex(r):
            raise ValueError("reduce_plus: a nominated vertex is missing from the base")
    return pg.base


def split_22_separation(inst: RootedInstance, sep: Separation) -> tuple:
    """Split at a two-vertex cut with two roots per side.

    Returns the two sub-instances (side plus the separator edge, nominated
    at its own roots and the separator); the original instance has a rooted
    minor exactly when at least one sub-instance does.
    """
    g = inst.graph
    if not is_k_connected(g, 2):
        raise ValueError("split_22_separation: graph is not 2-connected")
    if sep.order != 2 or sep.separator & inst.root_set:
        raise ValueError("split_22_separation: separator must be two non-nominated vertices")
    if sep.root_split != (2, 2):
        raise ValueError("split_22_separation: separation must carry two roots per side")
    u, v = svert(sep.separator)
    a, b = sorted((sep.left - sep.separator) & inst.root_set, key=vkey)
    c, d = sorted((sep.right - sep.separator) & inst.root_set, key=vkey)
    g1 = g.induced(sep.left)
    g2 = g.induced(sep.right)
    if not g.has_edge(u, v):
        g1 = g1.add_edges([(u, v)])
        g2 = g2.add_edges([(u, v)])
    return (
        RootedInstance(g1, (a, b, u, v)),
        RootedInstance(g2, (u, v, c, d)),
    )


def reduce_ear(inst: RootedInstance) -> Optional[RootedInstance]:
    """Remove a pair of nominated degree-2 twins, nominating their anchors.

    Applies when two roots share the same two-vertex neighbourhood with
    non-nominated anchors; returns the smaller equivalent instance, or None
    when the pattern is absent.
    """
    g = inst.graph
    rset = inst.root_set
    for x, y in itertools.combinations(sorted(rset, key=vkey), 2):
        if g.degree(x) != 2 or g.degree(y) != 2:
            continue
        if g.neighbors(x) != g.neighbors(y):
            continue
        u, v = g.neighbors(x)
        if u in rset or v in rset:
            continue
        rest = tuple(r for r in inst.roots if r not in (x, y))
        g2 = g.remove_vertices((x, y))
        if not g2.has_edge(u, v):
            g2 = g2.add_edges([(u, v)])
        return RootedInstance(g2, (u, v) + rest)
    return None
