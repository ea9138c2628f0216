"""Small brute-force reference implementations used as test oracles."""

from rootedk4 import Graph


def simple_paths(g: Graph, src, dst, banned=frozenset()):
    """Yield every simple path from src to dst avoiding `banned` vertices."""
    if src in banned or dst in banned:
        return
    stack = [(src, (src,), {src})]
    while stack:
        cur, path, on_path = stack.pop()
        if cur == dst:
            yield path
            continue
        for nxt in g.neighbors(cur):
            if nxt in on_path or nxt in banned:
                continue
            stack.append((nxt, path + (nxt,), on_path | {nxt}))


def reaches(g: Graph, src, dst, banned=frozenset()) -> bool:
    """True if a path from src to dst avoids all `banned` vertices."""
    if src in banned or dst in banned:
        return False
    seen = {src}
    stack = [src]
    while stack:
        x = stack.pop()
        if x == dst:
            return True
        for y in g.neighbors(x):
            if y not in seen and y not in banned:
                seen.add(y)
                stack.append(y)
    return False


def brute_linkage_exists(g: Graph, terminals) -> bool:
    """Vertex-disjoint s1-t1 and s2-t2 paths, by exhaustive path search."""
    s1, t1, s2, t2 = terminals
    if len({s1, t1, s2, t2}) != 4:
        raise ValueError("terminals must be distinct")
    for p1 in simple_paths(g, s1, t1, banned=frozenset((s2, t2))):
        if reaches(g, s2, t2, banned=frozenset(p1)):
            return True
    return False
