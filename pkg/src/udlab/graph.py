"""Immutable simple graphs on vertices ``0..n-1`` plus structural helpers."""

from __future__ import annotations

import io
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import bitset
from ._accel import njit
from .errors import InvalidInput


class Graph:
    """Simple undirected graph with a canonical sorted edge array.

    Edges are stored once as ``(u, v)`` with ``u < v`` in lexicographic order,
    so two graphs compare equal iff they have the same vertex count and edge
    set.  The bitset adjacency used by the solvers is built lazily.
    """

    __slots__ = ("n", "edges", "_adj", "_deg")

    def __init__(self, n: int, edges: Iterable = ()):
        n = int(n)
        if n < 0:
            raise InvalidInput("vertex count must be non-negative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= n:
                raise InvalidInput(f"edge endpoint out of range for n={n}")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise InvalidInput("self-loops are not allowed")
            arr = np.sort(arr, axis=1)
            arr = np.unique(arr, axis=0)
        arr.setflags(write=False)
        self.n = n
        self.edges = arr
        self._adj = None
        self._deg = None

    # -- basic queries -------------------------------------------------
    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        if self._deg is None:
            deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
            deg.setflags(write=False)
            self._deg = deg
        return self._deg

    @property
    def adj(self) -> np.ndarray:
        """Bitset adjacency, shape ``(n, words(n))`` uint64."""
        if self._adj is None:
            if self.n == 0:
                a = np.zeros((0, 1), dtype=np.uint64)
            else:
                a = bitset.build_adjacency(self.n, self.edges[:, 0].copy(), self.edges[:, 1].copy())
            a.setflags(write=False)
            self._adj = a
        return self._adj

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return bool(self.adj[u, v >> 6] & (np.uint64(1) << np.uint64(v & 63)))

    def neighbors(self, v: int) -> list:
        return bitset.to_indices(self.adj[v])

    def edge_list(self) -> list:
        return [(int(u), int(v)) for u, v in self.edges]

    def matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        if self.m:
            a[self.edges[:, 0], self.edges[:, 1]] = True
            a[self.edges[:, 1], self.edges[:, 0]] = True
        return a

    def induced(self, vertices) -> "Graph":
        """Induced subgraph, relabelled in the given vertex order."""
        vertices = [int(v) for v in vertices]
        index = {v: i for i, v in enumerate(vertices)}
        if len(index) != len(vertices):
            raise InvalidInput("duplicate vertex in induced()")
        keep = [(index[u], index[v]) for u, v in self.edge_list() if u in index and v in index]
        return Graph(len(vertices), keep)

    def complement(self) -> "Graph":
        a = ~self.matrix()
        np.fill_diagonal(a, False)
        u, v = np.nonzero(np.triu(a, 1))
        return Graph(self.n, np.column_stack([u, v]))

    def relabel(self, perm) -> "Graph":
        """Vertex ``v`` becomes ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Graph(self.n, perm[self.edges] if self.m else ())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    # -- conversions -----------------------------------------------------
    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edge_list())
        return g

    @classmethod
    def from_networkx(cls, g) -> "Graph":
        nodes = sorted(g.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls(len(nodes), [(index[u], index[v]) for u, v in g.edges()])

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"{self.n} {self.m}\n")
        for u, v in self.edges:
            buf.write(f"{u} {v}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        tokens = text.split()
        if len(tokens) < 2:
            raise InvalidInput("graph file must start with 'n m'")
        try:
            nums = [int(t) for t in tokens]
        except ValueError as exc:
            raise InvalidInput(f"non-integer token in graph file: {exc}") from None
        n, m = nums[0], nums[1]
        body = nums[2:]
        if n < 0 or m < 0 or len(body) != 2 * m:
            raise InvalidInput(f"graph file declares {m} edges but carries {len(body) // 2}")
        pairs = np.asarray(body, dtype=np.int64).reshape(-1, 2)
        if m and (np.any(pairs[:, 0] >= pairs[:, 1]) or pairs.min() < 0 or pairs.max() >= n):
            raise InvalidInput("edges must satisfy 0 <= u < v < n")
        g = cls(n, pairs)
        if g.m != m:
            raise InvalidInput("duplicate edges in graph file")
        return g


def read_graph(path) -> Graph:
    with open(path) as fh:
        return Graph.from_text(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(g.to_text())


# -- standard graphs -------------------------------------------------------

def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph(n, list(combinations(range(n), 2)))


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InvalidInput("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def moser_spindle() -> Graph:
    # two rhombi of unit equilateral triangles sharing vertex 0, tips 3 and 6 joined
    return Graph(7, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3),
                     (0, 4), (0, 5), (4, 5), (4, 6), (5, 6), (3, 6)])


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    off = 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edge_list())
        off += g.n
    return Graph(off, edges)


def join(a: Graph, b: Graph) -> Graph:
    """Disjoint union plus every edge between the two parts."""
    base = disjoint_union(a, b)
    cross = [(i, a.n + j) for i in range(a.n) for j in range(b.n)]
    return Graph(base.n, base.edge_list() + cross)


# -- component structure ---------------------------------------------------

@dataclass(frozen=True)
class ComponentClass:
    vertices: tuple
    kind: str  # "tree" | "unicyclic" | "multicyclic"
    edge_count: int
    cycle_length: Optional[int] = None


def component_labels(g: Graph):
    """``(count, labels)`` of connected components, labels ordered by min vertex."""
    if g.n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    mat = coo_matrix((np.ones(g.m), (g.edges[:, 0], g.edges[:, 1])), shape=(g.n, g.n)) if g.m else \
        coo_matrix((g.n, g.n))
    count, labels = connected_components(mat, directed=False)
    # scipy labels by discovery order from vertex 0 upward, which is already min-vertex order
    return int(count), labels.astype(np.int64)


@njit
def _two_core(n, indptr, indices):
    deg = np.zeros(n, dtype=np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    alive = np.ones(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for v in range(n):
        if deg[v] <= 1:
            stack[top] = v
            top += 1
            alive[v] = False
    while top > 0:
        top -= 1
        v = stack[top]
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if alive[u]:
                deg[u] -= 1
                if deg[u] <= 1:
                    alive[u] = False
                    stack[top] = u
                    top += 1
    return alive


def csr(g: Graph):
    if g.m == 0:
        return np.zeros(g.n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    src = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
    dst = np.concatenate([g.edges[:, 1], g.edges[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    return np.cumsum(indptr), dst.astype(np.int64)


def two_core_mask(g: Graph) -> np.ndarray:
    indptr, indices = csr(g)
    return _two_core(g.n, indptr, indices)


def components(g: Graph) -> list:
    """Classify each connected component as tree, unicyclic or multicyclic."""
    count, labels = component_labels(g)
    if count == 0:
        return []
    vcount = np.bincount(labels, minlength=count)
    ecount = np.bincount(labels[g.edges[:, 0]], minlength=count) if g.m else np.zeros(count, dtype=np.int64)
    core = None
    members = [[] for _ in range(count)]
    for v, lab in enumerate(labels):
        members[lab].append(v)
    out = []
    for c in range(count):
        nv, ne = int(vcount[c]), int(ecount[c])
        if ne == nv - 1:
            out.append(ComponentClass(tuple(members[c]), "tree", ne))
        elif ne == nv:
            if core is None:
                core = two_core_mask(g)
            length = int(sum(1 for v in members[c] if core[v]))
            out.append(ComponentClass(tuple(members[c]), "unicyclic", ne, length))
        else:
            out.append(ComponentClass(tuple(members[c]), "multicyclic", ne))
    return out


def is_linear_forest(g: Graph) -> bool:
    if g.n == 0:
        return True
    if g.m and int(g.degrees.max()) > 2:
        return False
    return all(c.kind == "tree" for c in components(g))
