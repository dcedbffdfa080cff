"""Three-valued realizability decisions with re-checkable certificates.

A graph is realizable as a distance graph in R^d when its vertices can be
placed at distinct points so that every edge has length exactly 1 (non-edges
may also happen to have length 1).  YES and NO answers always carry a
:class:`Certificate`; UNKNOWN never does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.spatial.distance import pdist

from ._accel import njit
from .embed import (
    RESIDUAL_TOL,
    SEPARATION_TOL,
    PointConfig,
    embed_unit_distance,
    place_generic_forest,
    residual,
)
from .errors import BudgetExceeded, InvalidInput, NoEmbeddingFound
from .graph import Graph, components, is_linear_forest, two_core_mask
from .rng import trial_rng
from .solvers import find_clique

ORACLE_BUDGET = 12


class Answer(str, Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


class Kind(str, Enum):
    LINEAR_FOREST = "LinearForest"
    TREE_UNICYCLIC = "TreeUnicyclic"
    NUMERICAL_EMBEDDING = "NumericalEmbedding"
    FORBIDDEN_SUBGRAPH = "ForbiddenSubgraph"
    CYCLE_1D = "CycleIn1D"
    HIGH_DEGREE_1D = "HighDegreeIn1D"


YES_KINDS = {Kind.LINEAR_FOREST, Kind.TREE_UNICYCLIC, Kind.NUMERICAL_EMBEDDING}


@dataclass(frozen=True)
class Certificate:
    kind: Kind
    witness: Any = None
    name: Optional[str] = None
    residual: Optional[float] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "witness": _jsonable(self.witness)}
        if self.name is not None:
            out["name"] = self.name
        if self.residual is not None:
            out["residual"] = float(self.residual)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        return cls(Kind(data["kind"]), data.get("witness"), data.get("name"), data.get("residual"))


@dataclass(frozen=True)
class Verdict:
    answer: Answer
    d: int
    certificate: Optional[Certificate] = None

    def __post_init__(self):
        if (self.certificate is None) != (self.answer == Answer.UNKNOWN):
            raise ValueError("YES/NO verdicts need a certificate; UNKNOWN must not carry one")

    def to_dict(self) -> dict:
        return {
            "answer": self.answer.value,
            "dimension": self.d,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        cert = data.get("certificate")
        return cls(Answer(data["answer"]), int(data["dimension"]), None if cert is None else Certificate.from_dict(cert))

    @classmethod
    def from_json(cls, text: str) -> "Verdict":
        return cls.from_dict(json.loads(text))


UNKNOWN = Answer.UNKNOWN


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


# ---------------------------------------------------------------------------
# dimension one
# ---------------------------------------------------------------------------

@njit
def linear_forest_kernel(n, eu, ev):
    """Status 0: linear forest, ``labels`` hold path positions.
    Status 1: ``info`` is the smallest vertex of degree >= 3.
    Status 2: ``info`` is the smallest vertex on a cycle."""
    labels = np.full(n, -1, dtype=np.int64)
    deg = np.zeros(n, dtype=np.int64)
    for i in range(eu.shape[0]):
        deg[eu[i]] += 1
        deg[ev[i]] += 1
    for v in range(n):
        if deg[v] > 2:
            return 1, v, labels
    nb = np.full((n, 2), -1, dtype=np.int64)
    for i in range(eu.shape[0]):
        u = eu[i]
        v = ev[i]
        nb[u, 0 if nb[u, 0] < 0 else 1] = v
        nb[v, 0 if nb[v, 0] < 0 else 1] = u
    for v in range(n):
        if labels[v] >= 0 or deg[v] > 1:
            continue
        prev = -1
        cur = v
        pos = 0
        while cur >= 0:
            labels[cur] = pos
            pos += 1
            nxt = nb[cur, 0] if nb[cur, 0] != prev else nb[cur, 1]
            prev = cur
            cur = nxt
    for v in range(n):
        if labels[v] < 0:
            return 2, v, labels
    return 0, -1, labels


def _walk_cycle(g: Graph, start: int) -> list:
    """Cycle through ``start`` in a graph of max degree 2 (start's component is a cycle)."""
    cyc = [start]
    prev, cur = -1, start
    while True:
        nb = [u for u in g.neighbors(cur) if u != prev]
        nxt = min(nb) if prev == -1 else nb[0]
        if nxt == start:
            return cyc
        cyc.append(nxt)
        prev, cur = cur, nxt


def decide_1d(g: Graph) -> Verdict:
    """Exact decision on the line: realizable iff the graph is a linear forest."""
    eu = g.edges[:, 0].copy()
    ev = g.edges[:, 1].copy()
    status, info, labels = linear_forest_kernel(g.n, eu, ev)
    if status == 0:
        return Verdict(Answer.YES, 1, Certificate(Kind.LINEAR_FOREST, [int(x) for x in labels]))
    if status == 1:
        v = int(info)
        return Verdict(Answer.NO, 1, Certificate(Kind.HIGH_DEGREE_1D, [v] + g.neighbors(v)[:3]))
    return Verdict(Answer.NO, 1, Certificate(Kind.CYCLE_1D, _walk_cycle(g, int(info))))


def _component_no_witness(g: Graph, comp: list) -> Certificate:
    for v in comp:
        nb = g.neighbors(v)
        if len(nb) >= 3:
            return Certificate(Kind.HIGH_DEGREE_1D, [v] + nb[:3])
    return Certificate(Kind.CYCLE_1D, _walk_cycle(g, min(comp)))


def decide_1d_oracle(g: Graph, budget: int = ORACLE_BUDGET) -> Verdict:
    """Brute-force check: search integer labellings with every edge a +-1 step.

    Each component is rooted at its smallest vertex (label 0) and labelled in
    BFS order; a vertex's label is forced to be its BFS parent's label plus or
    minus one, then checked against all labelled neighbours and for
    injectivity within the component.
    """
    if g.n > budget:
        raise BudgetExceeded(f"1D oracle limited to {budget} vertices")
    nbrs = [g.neighbors(v) for v in range(g.n)]
    labels = [None] * g.n
    seen = [False] * g.n
    for root in range(g.n):
        if seen[root]:
            continue
        order, parent = [root], {root: -1}
        seen[root] = True
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for u in nbrs[v]:
                if not seen[u]:
                    seen[u] = True
                    parent[u] = v
                    order.append(u)
        found = _label_component(order, parent, nbrs)
        if found is None:
            return Verdict(Answer.NO, 1, _component_no_witness(g, order))
        for v, lab in found.items():
            labels[v] = lab
    return Verdict(Answer.YES, 1, Certificate(Kind.LINEAR_FOREST, labels))


def _label_component(order, parent, nbrs):
    k = len(order)
    lab = {order[0]: 0}
    choice = [0] * k  # 0 -> try +1, 1 -> try -1, 2 -> exhausted
    i = 1
    if k == 1:
        return lab
    while 0 < i < k:
        v = order[i]
        lab.pop(v, None)
        placed = False
        while choice[i] < 2:
            cand = lab[parent[v]] + (1 if choice[i] == 0 else -1)
            choice[i] += 1
            if cand in lab.values():
                continue
            if all(abs(lab[u] - cand) == 1 for u in nbrs[v] if u in lab):
                lab[v] = cand
                placed = True
                break
        if placed:
            i += 1
        else:
            choice[i] = 0
            i -= 1
    return lab if i == k else None


# ---------------------------------------------------------------------------
# dimension >= 2
# ---------------------------------------------------------------------------

def find_k23(g: Graph):
    """Two vertices with three common neighbours, as ``(a1, a2, b1, b2, b3)``."""
    if g.m < 6:
        return None
    a = csr_matrix((np.ones(2 * g.m, dtype=np.int64),
                    (np.concatenate([g.edges[:, 0], g.edges[:, 1]]),
                     np.concatenate([g.edges[:, 1], g.edges[:, 0]]))), shape=(g.n, g.n))
    common = (a @ a).tocoo()
    hit = (common.row < common.col) & (common.data >= 3)
    if not np.any(hit):
        return None
    rows, cols = common.row[hit], common.col[hit]
    i = np.lexsort((cols, rows))[0]
    u, v = int(rows[i]), int(cols[i])
    both = sorted(set(g.neighbors(u)) & set(g.neighbors(v)))[:3]
    return (u, v, *both)


def _forbidden_check(g: Graph, d: int) -> Optional[Verdict]:
    clique = find_clique(g, d + 2)
    if clique is not None:
        return Verdict(Answer.NO, d, Certificate(Kind.FORBIDDEN_SUBGRAPH, list(clique), name=f"K{d + 2}"))
    if d == 2:
        w = find_k23(g)
        if w is not None:
            return Verdict(Answer.NO, d, Certificate(Kind.FORBIDDEN_SUBGRAPH, list(w), name="K2,3"))
    return None


def _numerical_placement(g: Graph, d: int, budget: int, seed: int) -> Optional[np.ndarray]:
    comps = components(g)
    blocks = []
    easy = [v for c in comps if c.kind != "multicyclic" for v in c.vertices]
    rng = trial_rng(seed, 0, stream=11)
    if easy:
        sub = g.induced(easy)
        x = None
        for _ in range(8):
            x = place_generic_forest(sub, rng, d=d)
            if x is not None:
                break
        if x is None:
            return None
        blocks.append((easy, x))
    for idx, c in enumerate(c for c in comps if c.kind == "multicyclic"):
        sub = g.induced(c.vertices)
        x = _embed_with_trees(sub, d, budget, seed + 7919 * (idx + 1), rng)
        if x is None:
            return None
        blocks.append((list(c.vertices), x))
    out = np.zeros((g.n, d))
    offset = 0.0
    for verts, x in blocks:
        x = x - x.min(axis=0)
        x[:, 0] += offset
        offset = float(x[:, 0].max()) + 3.0
        out[verts] = x
    return out


def _embed_with_trees(sub: Graph, d: int, budget: int, seed: int, rng) -> Optional[np.ndarray]:
    """Embed the 2-core numerically, then hang the pendant trees off it.

    A vertex of degree one can always be added at unit distance from its
    neighbour while avoiding the finitely many occupied points, so only the
    core needs the solver.
    """
    core = [int(v) for v in np.flatnonzero(two_core_mask(sub))]
    try:
        res = embed_unit_distance(sub.induced(core), d, restarts=budget, seed=seed)
    except NoEmbeddingFound:
        return None
    base = np.array(res.config.points)
    for _ in range(16):
        x = np.zeros((sub.n, d))
        placed = np.zeros(sub.n, dtype=bool)
        x[core] = base
        placed[core] = True
        frontier = list(core)
        while frontier:
            v = frontier.pop(0)
            for u in sub.neighbors(v):
                if placed[u]:
                    continue
                step = rng.normal(size=d)
                x[u] = x[v] + step / np.linalg.norm(step)
                placed[u] = True
                frontier.append(u)
        if pdist(x).min() >= SEPARATION_TOL:
            return x
    return None


def decide(g: Graph, d: int, budget: int = 200, seed: int = 0) -> Verdict:
    """Realizability in R^d; first firing rule wins.

    NO when the graph contains ``K_{d+2}`` (or, in the plane, ``K_{2,3}``);
    YES when every component is a tree or unicyclic; YES when the embedder
    places every multicyclic component within ``budget`` restarts; UNKNOWN
    otherwise.
    """
    if d == 1:
        return decide_1d(g)
    if d < 1:
        raise InvalidInput("dimension must be positive")
    no = _forbidden_check(g, d)
    if no is not None:
        return no
    comps = components(g)
    if all(c.kind != "multicyclic" for c in comps):
        cycles = sorted(c.cycle_length for c in comps if c.kind == "unicyclic")
        return Verdict(Answer.YES, d, Certificate(Kind.TREE_UNICYCLIC, {"components": len(comps), "cycles": cycles}))
    x = _numerical_placement(g, d, budget, seed)
    if x is not None and g.n > 1:
        res = float(np.max(np.abs(((x[g.edges[:, 0]] - x[g.edges[:, 1]]) ** 2).sum(axis=1) - 1.0)))
        if res <= RESIDUAL_TOL and float(pdist(x).min()) >= SEPARATION_TOL:
            return Verdict(Answer.YES, d, Certificate(Kind.NUMERICAL_EMBEDDING, x.tolist(), residual=res))
    return Verdict(Answer.UNKNOWN, d)


# ---------------------------------------------------------------------------
# certificate checking
# ---------------------------------------------------------------------------

def validate_certificate(g: Graph, v: Verdict) -> bool:
    """Re-derive the certificate's claim from scratch; False on any mismatch."""
    if v.answer == Answer.UNKNOWN or v.certificate is None:
        return False
    cert = v.certificate
    if (cert.kind in YES_KINDS) != (v.answer == Answer.YES):
        return False
    try:
        return bool(_CHECKS[cert.kind](g, v.d, cert))
    except (TypeError, ValueError, IndexError, KeyError, InvalidInput):
        return False


def _vertex_list(w, g: Graph, size=None) -> list:
    verts = [int(x) for x in w]
    if any(x != y for x, y in zip(verts, w)):
        raise ValueError("non-integer vertex")
    if size is not None and len(verts) != size:
        raise ValueError("wrong witness size")
    if len(set(verts)) != len(verts) or any(not 0 <= x < g.n for x in verts):
        raise ValueError("bad witness vertices")
    return verts


def _check_linear_forest(g, d, cert):
    if d != 1 or not is_linear_forest(g):
        return False
    if cert.witness is None:
        return True
    labels = [int(x) for x in cert.witness]
    if len(labels) != g.n:
        return False
    comp_of = {}
    for i, c in enumerate(components(g)):
        for x in c.vertices:
            comp_of[x] = i
        if len({labels[x] for x in c.vertices}) != len(c.vertices):
            return False
    return all(abs(labels[a] - labels[b]) == 1 for a, b in g.edge_list())


def _check_tree_unicyclic(g, d, cert):
    if d < 2:
        return False
    comps = components(g)
    if any(c.kind == "multicyclic" for c in comps):
        return False
    w = cert.witness
    if isinstance(w, dict):
        cycles = sorted(c.cycle_length for c in comps if c.kind == "unicyclic")
        if w.get("components") != len(comps) or list(w.get("cycles", [])) != cycles:
            return False
    return True


def _check_embedding(g, d, cert):
    pts = np.asarray(cert.witness, dtype=np.float64)
    if pts.ndim != 2 or pts.shape != (g.n, d):
        return False
    cfg = PointConfig(pts)
    return residual(g, cfg) <= RESIDUAL_TOL and cfg.min_separation >= SEPARATION_TOL


def _check_forbidden(g, d, cert):
    name = cert.name or ""
    if name == "K2,3":
        a1, a2, b1, b2, b3 = _vertex_list(cert.witness, g, 5)
        return d == 2 and all(g.has_edge(a, b) for a in (a1, a2) for b in (b1, b2, b3))
    if name.startswith("K") and name[1:].isdigit():
        t = int(name[1:])
        verts = _vertex_list(cert.witness, g, t)
        return t >= d + 2 and all(g.has_edge(a, b) for i, a in enumerate(verts) for b in verts[i + 1:])
    return False


def _check_cycle_1d(g, d, cert):
    cyc = _vertex_list(cert.witness, g)
    if d != 1 or len(cyc) < 3:
        return False
    return all(g.has_edge(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc)))


def _check_high_degree(g, d, cert):
    v, a, b, c = _vertex_list(cert.witness, g, 4)
    return d == 1 and g.has_edge(v, a) and g.has_edge(v, b) and g.has_edge(v, c)


_CHECKS = {
    Kind.LINEAR_FOREST: _check_linear_forest,
    Kind.TREE_UNICYCLIC: _check_tree_unicyclic,
    Kind.NUMERICAL_EMBEDDING: _check_embedding,
    Kind.FORBIDDEN_SUBGRAPH: _check_forbidden,
    Kind.CYCLE_1D: _check_cycle_1d,
    Kind.HIGH_DEGREE_1D: _check_high_degree,
}
