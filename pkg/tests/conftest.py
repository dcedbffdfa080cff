"""Brute-force oracles shared by the tests.

Everything here is deliberately naive (subset enumeration, plain Python) so it
shares no code with the bitset kernels it checks.
"""

from itertools import combinations, product

import networkx as nx
import numpy as np
import pytest
from hypothesis import settings

from udlab.graph import Graph

# first calls pay numba compilation, so wall-clock deadlines are meaningless
settings.register_profile("udlab", deadline=None, max_examples=60)
settings.load_profile("udlab")


def atlas_graphs(n):
    """Every graph on ``n`` vertices up to isomorphism (n <= 7)."""
    return [Graph.from_networkx(h) for h in nx.graph_atlas_g() if h.number_of_nodes() == n]


def random_graph(rng, n, p=None):
    if p is None:
        p = rng.uniform(0.1, 0.9)
    iu, iv = np.triu_indices(n, 1)
    keep = rng.random(iu.shape[0]) < p
    return Graph(n, np.column_stack([iu[keep], iv[keep]]))


def masks(g):
    m = [0] * g.n
    for u, v in g.edge_list():
        m[u] |= 1 << v
        m[v] |= 1 << u
    return m


def is_independent(adjm, S):
    return all(not (adjm[v] & S) for v in range(len(adjm)) if S >> v & 1)


def brute_alpha(g):
    adjm = masks(g)
    return max(bin(S).count("1") for S in range(1 << g.n) if is_independent(adjm, S))


def brute_chromatic(g):
    """Minimum number of independent sets covering V, by DP over subsets."""
    n = g.n
    if n == 0:
        return 0
    adjm = masks(g)
    full = (1 << n) - 1
    indep = [is_independent(adjm, S) for S in range(1 << n)]
    best = [0] + [n + 1] * full
    for S in range(1, full + 1):
        low = S & -S
        rest = S ^ low
        sub = rest
        while True:
            T = sub | low
            if indep[T]:
                best[S] = min(best[S], best[S ^ T] + 1)
            if sub == 0:
                break
            sub = (sub - 1) & rest
    return best[full]


def brute_colorable(g, k):
    edges = g.edge_list()
    return any(all(c[u] != c[v] for u, v in edges) for c in product(range(k), repeat=g.n))


def is_induced_cycle(g, verts):
    verts = list(verts)
    if len(verts) < 3:
        return False
    sub = g.induced(verts)
    if any(d != 2 for d in sub.degrees):
        return False
    return nx.is_connected(sub.to_networkx())


def brute_induced_cycle(g, parity="any"):
    """(size, lexicographically smallest vertex set) of the longest chordless cycle."""
    adjm = masks(g)
    best = None
    for size in range(g.n, 2, -1):
        if parity == "odd" and size % 2 == 0:
            continue
        if parity == "even" and size % 2 == 1:
            continue
        for S in combinations(range(g.n), size):
            bits = sum(1 << v for v in S)
            if any(bin(adjm[v] & bits).count("1") != 2 for v in S):
                continue
            # 2-regular: a single cycle iff connected
            seen = {S[0]}
            stack = [S[0]]
            while stack:
                v = stack.pop()
                for u in S:
                    if u not in seen and adjm[v] >> u & 1:
                        seen.add(u)
                        stack.append(u)
            if len(seen) == size:
                best = (size, S)
                break
        if best:
            return best
    return None


def brute_contains_induced(g, h):
    """Lexicographically smallest vertex set inducing a copy of ``h``."""
    hx = h.to_networkx()
    for S in combinations(range(g.n), h.n):
        sub = g.induced(S)
        if sub.m != h.m:
            continue
        if nx.is_isomorphic(sub.to_networkx(), hx):
            return S
    return None


def free_trees(n):
    if n == 1:
        return [Graph(1)]
    return [Graph.from_networkx(t) for t in nx.nonisomorphic_trees(n)]


def unicyclic_graphs(n):
    """Connected unicyclic graphs on ``n`` vertices up to isomorphism."""
    out, seen = [], {}
    for t in free_trees(n):
        tx = t.to_networkx()
        for u, v in combinations(range(n), 2):
            if tx.has_edge(u, v):
                continue
            h = tx.copy()
            h.add_edge(u, v)
            key = nx.weisfeiler_lehman_graph_hash(h)
            bucket = seen.setdefault(key, [])
            if any(nx.is_isomorphic(h, o) for o in bucket):
                continue
            bucket.append(h)
            out.append(Graph.from_networkx(h))
    return out


@pytest.fixture(scope="session")
def graphs7():
    return atlas_graphs(7)
