"""Hypothesis strategies shared across the test modules."""

from hypothesis import strategies as st

from rootedk4 import Graph, RootedInstance


@st.composite
def graphs(draw, min_n=4, max_n=8, connected=True):
    """Random graphs on vertex set 0..n-1, connected by default."""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, keep in zip(pairs, mask) if keep]
    if connected and n > 1:
        # a random spanning tree keeps the distribution honest
        for i in range(1, n):
            edges.append((draw(st.integers(min_value=0, max_value=i - 1)), i))
    return Graph(range(n), edges)


@st.composite
def instances(draw, min_n=4, max_n=8, connected=True):
    """Rooted instances over `graphs`, with four distinct roots."""
    g = draw(graphs(min_n=min_n, max_n=max_n, connected=connected))
    roots = draw(st.permutations(g.vertices))[:4]
    return RootedInstance(g, tuple(roots))
