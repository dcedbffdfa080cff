"""Diameter-graph families with chromatic number d+1 and the u_d estimator.

A family is usable for estimation only after :func:`validate_entry` has
recomputed its diameter graph from generated coordinates and confirmed the
claimed chromatic number.  Coordinates are always regenerated from
``(family, params)``; they are never stored.

Shipped families:

* ``odd_polygon(k)``: regular (2k+1)-gon in the plane, diameter graph C_{2k+1}.
* ``simplex(d)``: regular unit simplex, diameter graph K_{d+1}.
* ``apex_stack(k, a)``: a (2k+1)-gon plus ``a`` apexes in the orthogonal
  complement, each at diameter distance from every polygon vertex and from
  each other; diameter graph C_{2k+1} joined with K_a, in R^{2+a}.
* ``triangle_pendant()``: unit triangle plus a point on the arc opposite one
  vertex; diameter graph is a triangle with a pendant edge.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import networkx as nx
import numpy as np

from . import bitset
from .embed import PointConfig, compute_diameter_graph
from .errors import DegenerateDiameter, GeometryInfeasible, InvalidInput
from .graph import Graph, complete_graph, cycle_graph, join
from .solvers import chromatic_number, contains_induced, induced_cycle_search

FAMILIES = ("odd_polygon", "simplex", "apex_stack", "triangle_pendant")
MAX_CATALOG_VERTICES = 64
HEURISTIC_NODE_LIMIT = 200_000


@dataclass
class CatalogEntry:
    family: str
    params: tuple
    d: int
    claimed_graph: Graph
    claimed_chi: int
    validated: bool = False

    def coordinates(self) -> PointConfig:
        _, cfg = generate(self.family, self.params)
        return cfg

    @property
    def size(self) -> int:
        return self.claimed_graph.n

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": list(self.params),
            "d": self.d,
            "claimed_chi": self.claimed_chi,
            "validated": self.validated,
        }


def _regular_simplex(dim: int, side: float = 1.0) -> np.ndarray:
    """``dim + 1`` points in R^dim, pairwise at distance ``side``, centred at the origin."""
    if dim == 0:
        return np.zeros((1, 0))
    x = (np.eye(dim + 1) - 1.0 / (dim + 1)) * (side / math.sqrt(2.0))
    _, _, vt = np.linalg.svd(x)
    return x @ vt[:dim].T


def _polygon(k: int) -> np.ndarray:
    m = 2 * k + 1
    ang = 2.0 * np.pi * np.arange(m) / m
    return np.column_stack([np.cos(ang), np.sin(ang)])


def generate(family: str, params=()) -> tuple:
    """Claimed diameter graph and coordinates for a family member."""
    params = tuple(int(p) for p in params)
    if family == "odd_polygon":
        (k,) = params
        if k < 1:
            raise InvalidInput("odd_polygon needs k >= 1")
        return cycle_graph(2 * k + 1), PointConfig(_polygon(k))
    if family == "simplex":
        (d,) = params
        if d < 1:
            raise InvalidInput("simplex needs d >= 1")
        return complete_graph(d + 1), PointConfig(_regular_simplex(d))
    if family == "apex_stack":
        k, a = params
        if k < 1 or a < 1:
            raise InvalidInput("apex_stack needs k >= 1 and a >= 1")
        poly = _polygon(k)
        diam = 2.0 * math.sin(k * math.pi / (2 * k + 1))
        h2 = diam * diam - 1.0  # squared apex distance from the polygon centre
        ring = diam * math.sqrt((a - 1) / (2.0 * a))  # circumradius of the apex simplex
        lift2 = h2 - ring * ring
        if lift2 < 0.0:
            raise GeometryInfeasible(f"no real apex placement for k={k}, a={a}")
        apex = np.zeros((a, a))
        if a > 1:
            apex[:, : a - 1] = _regular_simplex(a - 1, side=diam)
        apex[:, a - 1] = math.sqrt(lift2)
        pts = np.zeros((2 * k + 1 + a, 2 + a))
        pts[: 2 * k + 1, :2] = poly
        pts[2 * k + 1:, 2:] = apex
        return join(cycle_graph(2 * k + 1), complete_graph(a)), PointConfig(pts)
    if family == "triangle_pendant":
        if params:
            raise InvalidInput("triangle_pendant takes no parameters")
        h = math.sqrt(3.0) / 2.0
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, h], [0.5, h - 1.0]])
        return Graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)]), PointConfig(pts)
    raise InvalidInput(f"unknown family {family!r}; expected one of {FAMILIES}")


def make_entry(family: str, params=()) -> CatalogEntry:
    params = tuple(int(p) for p in params)
    graph, cfg = generate(family, params)
    if family == "odd_polygon" or family == "triangle_pendant":
        d = 2
    elif family == "simplex":
        d = params[0]
    else:
        d = 2 + params[1]
    return CatalogEntry(family, params, d, graph, d + 1)


def graphs_isomorphic(a: Graph, b: Graph) -> bool:
    if a.n != b.n or a.m != b.m:
        return False
    if sorted(a.degrees.tolist()) != sorted(b.degrees.tolist()):
        return False
    return nx.is_isomorphic(a.to_networkx(), b.to_networkx())


def validate_entry(e: CatalogEntry, rel_tol: float = 1e-9) -> bool:
    """Recompute the diameter graph from coordinates; check isomorphism and chromatic number.

    Raises ``BudgetExceeded`` when the entry is too large for exact coloring.
    """
    try:
        cfg = e.coordinates()
        diam_graph = compute_diameter_graph(cfg, rel_tol)
        ok = cfg.d == e.d and graphs_isomorphic(diam_graph, e.claimed_graph)
        if ok:
            ok = chromatic_number(e.claimed_graph, budget=max(40, min(e.size, MAX_CATALOG_VERTICES))) == e.claimed_chi
    except (InvalidInput, GeometryInfeasible, DegenerateDiameter, ValueError):
        ok = False
    e.validated = bool(ok)
    return e.validated


def catalog_members(d: int, max_vertices: int = MAX_CATALOG_VERTICES) -> list:
    """Unvalidated family members for dimension ``d`` up to ``max_vertices`` vertices."""
    out = []
    if d == 1:
        out.append(make_entry("simplex", (1,)))
    elif d == 2:
        k = 1
        while 2 * k + 1 <= max_vertices:
            out.append(make_entry("odd_polygon", (k,)))
            k += 1
        out.append(make_entry("triangle_pendant"))
    else:
        out.append(make_entry("simplex", (d,)))
        a = d - 2
        k = 2
        while 2 * k + 1 + a <= max_vertices:
            out.append(make_entry("apex_stack", (k, a)))
            k += 1
    return out


@lru_cache(maxsize=None)
def _default_catalog(d: int, max_vertices: int) -> tuple:
    entries = catalog_members(d, max_vertices)
    for e in entries:
        validate_entry(e)
    return tuple(entries)


def default_catalog(d: int, max_vertices: int = MAX_CATALOG_VERTICES) -> list:
    """Validated catalog for dimension ``d`` (cached; entries are shared objects)."""
    return list(_default_catalog(d, max_vertices))


def catalog_to_json(entries) -> str:
    return json.dumps([e.to_dict() for e in entries], sort_keys=True, indent=1)


def catalog_from_json(text: str, revalidate: bool = True) -> list:
    out = []
    for row in json.loads(text):
        e = make_entry(row["family"], row.get("params", ()))
        if e.d != row.get("d", e.d) or e.claimed_chi != row.get("claimed_chi", e.claimed_chi):
            raise InvalidInput(f"catalog row disagrees with its family definition: {row}")
        if revalidate:
            validate_entry(e)
        else:
            e.validated = bool(row.get("validated", False))
        out.append(e)
    return out


# ---------------------------------------------------------------------------
# estimation
# ---------------------------------------------------------------------------

@dataclass
class UEstimate:
    n: int
    p: Optional[float]
    d: int
    k_hat: int
    connected_variant: bool
    exact: bool
    trials: int = 1
    frac_success: float = 0.0
    witness: tuple = ()
    family: Optional[str] = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["witness"] = list(self.witness)
        return out


def _structure(e: CatalogEntry):
    """``(apex_count, cycle_length)`` when the entry is a cycle joined with a clique."""
    if e.family == "odd_polygon":
        return 0, 2 * e.params[0] + 1
    if e.family == "apex_stack":
        return e.params[1], 2 * e.params[0] + 1
    if e.family == "simplex" and e.params[0] >= 2:
        return e.params[0] - 2, 3
    return None


def _cliques(g: Graph, size: int):
    """All cliques of ``size`` vertices in lexicographic order."""
    if size == 0:
        yield ()
        return

    def rec(clique, cands):
        if len(clique) == size:
            yield tuple(clique)
            return
        need = size - len(clique)
        for i, u in enumerate(cands):
            if len(cands) - i < need:
                return
            yield from rec(clique + [u], [w for w in cands[i + 1:] if g.has_edge(u, w)])

    for v in range(g.n):
        yield from rec([v], [u for u in g.neighbors(v) if u > v])


def usable_entries(catalog, d: int, connected: bool = False) -> list:
    out = []
    for e in catalog:
        if not e.validated or e.d != d or e.claimed_chi != d + 1:
            continue
        if connected and not nx.is_connected(e.claimed_graph.to_networkx()):
            continue
        out.append(e)
    return out


def estimate_u(
    g: Graph,
    d: int,
    catalog=None,
    connected: bool = False,
    exact_limit: int = 40,
    node_limit: int = HEURISTIC_NODE_LIMIT,
    p: Optional[float] = None,
) -> UEstimate:
    """Largest induced subgraph of ``g`` isomorphic to a validated catalog graph.

    Cycle-plus-clique families are searched structurally: every ``a``-clique
    ``Q`` is tried as the apex set and the longest admissible induced odd
    cycle inside the common neighbourhood of ``Q`` completes it.  Other
    entries go through induced pattern matching.  When ``g.n > exact_limit``
    the cycle searches are truncated after ``node_limit`` nodes and the result
    is flagged ``exact=False`` (a lower bound).
    """
    if catalog is None:
        catalog = default_catalog(d)
    entries = usable_entries(catalog, d, connected)
    exact = g.n <= exact_limit
    limit = 0 if exact else int(node_limit)
    truncated_any = False

    groups: dict = {}
    names: dict = {}
    generic = []
    for e in entries:
        s = _structure(e)
        if s is None:
            generic.append(e)
        else:
            groups.setdefault(s[0], set()).add(s[1])
            names.setdefault(s, e.family)

    best, witness, fam = 0, (), None
    for e in sorted(generic, key=lambda e: -e.size):
        if e.size <= best or e.size > g.n:
            continue
        w = contains_induced(g, e.claimed_graph)
        if w is not None:
            best, witness, fam = e.size, tuple(sorted(w)), e.family

    ceiling = max((a + max(ls) for a, ls in groups.items()), default=0)
    for a in sorted(groups):
        lengths = groups[a]
        lmax = max(lengths)
        if a + lmax <= best or a + 3 > g.n:
            continue
        for q in _cliques(g, a):
            if best >= ceiling:
                break
            if a:
                common = g.adj[q[0]].copy()
                for v in q[1:]:
                    common &= g.adj[v]
                within = bitset.to_indices(common)
            else:
                within = None
            room = g.n if within is None else len(within)
            cap = min(lmax, room)
            while cap >= 3 and a + cap > best:
                size, cyc, trunc = induced_cycle_search(
                    g, "odd", max_len=cap, min_len=max(3, best - a + 1), within=within, node_limit=limit
                )
                truncated_any |= trunc
                if size == 0:
                    break
                if size in lengths:
                    best, witness = a + size, tuple(sorted(q + tuple(cyc)))
                    fam = names[(a, size)]
                    break
                cap = size - 2
    k_hat = best
    return UEstimate(
        n=g.n, p=p, d=d, k_hat=k_hat, connected_variant=connected,
        exact=exact and not truncated_any, trials=1, frac_success=1.0 if k_hat > 0 else 0.0,
        witness=witness, family=fam,
    )


# ---------------------------------------------------------------------------
# reference lines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeSpec:
    n: int
    p: float
    tau_pn: float
    tau_alpha: Optional[float]
    tau_quarter: float
    sigma: float
    alpha: Optional[float] = None
    C: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def regime_spec(n: int, p: float, alpha: Optional[float] = None, C: Optional[float] = None) -> RegimeSpec:
    """Evaluate the scale functions tau(n) (three forms) and sigma(n) = q ln n."""
    ln = math.log(n)
    return RegimeSpec(
        n=n, p=p,
        tau_pn=p * n,
        tau_alpha=None if alpha is None else p * n ** alpha,
        tau_quarter=p * n ** 0.25 / ln,
        sigma=(1.0 - p) * ln,
        alpha=alpha, C=C,
    )


@dataclass(frozen=True)
class UBounds:
    n: int
    p: float
    d: int
    L1: float
    L2: float
    U_gen: float
    U_const_p: float
    zero_regime_bound: float
    L_alpha: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def theoretical_u_bounds(n: int, p: float, d: int, alpha: Optional[float] = None) -> UBounds:
    """Asymptotic reference values (epsilon = 0), reported as lines, not guarantees.

    L1 = 2 log_{1/(1-p)}(np); L2 = (2 + 4 ln p / ln(np)) log_{1/(1-p)}(np);
    U_gen = (d+1) L1; U_const_p = floor(d/2) L1; the zero regime holds for
    p < c/n with c below ``zero_regime_bound``.
    """
    if not 0.0 < p < 1.0:
        raise InvalidInput("theoretical bounds need 0 < p < 1")
    log_base = -math.log1p(-p)
    lnp = math.log(n * p)
    base = lnp / log_base
    L1 = 2.0 * base
    L2 = (2.0 + 4.0 * math.log(p) / lnp) * base if lnp != 0.0 else float("nan")
    zero = 2.0 * (d - 1) * math.log(d - 1) if d >= 3 else 1.0
    L_alpha = None if alpha is None else (2.0 - 2.0 * alpha) * math.log(n) / p
    return UBounds(n, p, d, L1, L2, (d + 1) * L1, (d // 2) * L1, zero, L_alpha)


def histogram(values) -> dict:
    return dict(sorted(Counter(int(v) for v in values).items()))
