"""Unit-distance placement of graphs and diameter graphs of point sets."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import least_squares
from scipy.sparse import csr_matrix
from scipy.spatial.distance import pdist

from ._accel import njit
from .errors import DegenerateDiameter, InvalidInput, NoEmbeddingFound
from .graph import Graph
from .rng import trial_rng

RESIDUAL_TOL = 1e-9
SEPARATION_TOL = 1e-6
REPULSION_RADIUS = 0.1
REPULSION_WEIGHT = 1.0
MAX_DIMENSION = 16
MAX_NFEV = 400  # per solver stage; successful starts rarely need more than ~200
SPARSE_FROM = 24  # vertex count where the repulsion stage switches to a sparse Jacobian


@dataclass(frozen=True, eq=False)
class PointConfig:
    points: np.ndarray
    d: int = field(init=False)
    min_separation: float = field(init=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise InvalidInput("points must be an (n, d) array with d >= 1")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("non-finite coordinate")
        pts.setflags(write=False)
        sep = float(pdist(pts).min()) if pts.shape[0] > 1 else float("inf")
        if sep <= 0.0:
            raise InvalidInput("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "d", int(pts.shape[1]))
        object.__setattr__(self, "min_separation", sep)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"{self.n} {self.d}\n")
        for row in self.points:
            buf.write(" ".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "PointConfig":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise InvalidInput("empty point file")
        try:
            n, d = (int(t) for t in lines[0].split())
            rows = [[float(t) for t in ln.split()] for ln in lines[1:]]
        except ValueError as exc:
            raise InvalidInput(f"malformed point file: {exc}") from None
        if len(rows) != n or any(len(r) != d for r in rows):
            raise InvalidInput(f"point file declares {n} points in dimension {d}")
        return cls(np.asarray(rows, dtype=np.float64).reshape(n, d))


def read_points(path) -> PointConfig:
    with open(path) as fh:
        return PointConfig.from_text(fh.read())


def write_points(cfg: PointConfig, path) -> None:
    with open(path, "w") as fh:
        fh.write(cfg.to_text())


@dataclass(frozen=True)
class EmbedResult:
    config: PointConfig
    residual: float
    restarts_used: int

    @property
    def success(self) -> bool:
        return self.residual <= RESIDUAL_TOL and self.config.min_separation >= SEPARATION_TOL


# ---------------------------------------------------------------------------
# objective kernels
# ---------------------------------------------------------------------------

@njit
def edge_residual_max(x, eu, ev):
    worst = 0.0
    for e in range(eu.shape[0]):
        s = 0.0
        for k in range(x.shape[1]):
            t = x[eu[e], k] - x[ev[e], k]
            s += t * t
        r = abs(s - 1.0)
        if r > worst:
            worst = r
    return worst


@njit
def residual_vector(flat, n, d, eu, ev, pu, pv, r0sq, sqrt_w):
    m = eu.shape[0]
    out = np.zeros(m + pu.shape[0])
    for e in range(m):
        s = 0.0
        for k in range(d):
            t = flat[eu[e] * d + k] - flat[ev[e] * d + k]
            s += t * t
        out[e] = s - 1.0
    for q in range(pu.shape[0]):
        s = 0.0
        for k in range(d):
            t = flat[pu[q] * d + k] - flat[pv[q] * d + k]
            s += t * t
        gap = r0sq - s
        out[m + q] = sqrt_w * gap if gap > 0.0 else 0.0
    return out


@njit
def residual_jacobian(flat, n, d, eu, ev, pu, pv, r0sq, sqrt_w):
    m = eu.shape[0]
    jac = np.zeros((m + pu.shape[0], n * d))
    for e in range(m):
        for k in range(d):
            t = flat[eu[e] * d + k] - flat[ev[e] * d + k]
            jac[e, eu[e] * d + k] = 2.0 * t
            jac[e, ev[e] * d + k] = -2.0 * t
    for q in range(pu.shape[0]):
        s = 0.0
        for k in range(d):
            t = flat[pu[q] * d + k] - flat[pv[q] * d + k]
            s += t * t
        if r0sq - s > 0.0:
            for k in range(d):
                t = flat[pu[q] * d + k] - flat[pv[q] * d + k]
                jac[m + q, pu[q] * d + k] = -2.0 * sqrt_w * t
                jac[m + q, pv[q] * d + k] = 2.0 * sqrt_w * t
    return jac


@njit
def residual_jacobian_entries(flat, n, d, eu, ev, pu, pv, r0sq, sqrt_w):
    """Row, column and value arrays of :func:`residual_jacobian` (inactive pairs give zeros)."""
    m = eu.shape[0]
    nnz = 2 * d * (m + pu.shape[0])
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.zeros(nnz)
    j = 0
    for e in range(m):
        for k in range(d):
            t = flat[eu[e] * d + k] - flat[ev[e] * d + k]
            rows[j] = e
            cols[j] = eu[e] * d + k
            vals[j] = 2.0 * t
            rows[j + 1] = e
            cols[j + 1] = ev[e] * d + k
            vals[j + 1] = -2.0 * t
            j += 2
    for q in range(pu.shape[0]):
        s = 0.0
        for k in range(d):
            t = flat[pu[q] * d + k] - flat[pv[q] * d + k]
            s += t * t
        active = r0sq - s > 0.0
        for k in range(d):
            t = flat[pu[q] * d + k] - flat[pv[q] * d + k]
            rows[j] = m + q
            cols[j] = pu[q] * d + k
            rows[j + 1] = m + q
            cols[j + 1] = pv[q] * d + k
            if active:
                vals[j] = -2.0 * sqrt_w * t
                vals[j + 1] = 2.0 * sqrt_w * t
            j += 2
    return rows, cols, vals


def _sparse_jacobian(flat, n, d, eu, ev, pu, pv, r0sq, sqrt_w):
    rows, cols, vals = residual_jacobian_entries(flat, n, d, eu, ev, pu, pv, r0sq, sqrt_w)
    return csr_matrix((vals, (rows, cols)), shape=(eu.shape[0] + pu.shape[0], n * d))


@njit
def objective_and_gradient(flat, n, d, eu, ev, pu, pv, r0sq, w):
    """Sum of squared edge defects plus the short-range repulsion, and its gradient."""
    f = 0.0
    grad = np.zeros(n * d)
    for e in range(eu.shape[0]):
        s = 0.0
        for k in range(d):
            t = flat[eu[e] * d + k] - flat[ev[e] * d + k]
            s += t * t
        r = s - 1.0
        f += r * r
        for k in range(d):
            t = flat[eu[e] * d + k] - flat[ev[e] * d + k]
            grad[eu[e] * d + k] += 4.0 * r * t
            grad[ev[e] * d + k] -= 4.0 * r * t
    for q in range(pu.shape[0]):
        s = 0.0
        for k in range(d):
            t = flat[pu[q] * d + k] - flat[pv[q] * d + k]
            s += t * t
        gap = r0sq - s
        if gap > 0.0:
            f += w * gap * gap
            for k in range(d):
                t = flat[pu[q] * d + k] - flat[pv[q] * d + k]
                grad[pu[q] * d + k] -= 4.0 * w * gap * t
                grad[pv[q] * d + k] += 4.0 * w * gap * t
    return f, grad


def non_edges(g: Graph):
    a = g.matrix()
    iu, iv = np.triu_indices(g.n, 1)
    keep = ~a[iu, iv]
    return iu[keep].astype(np.int64), iv[keep].astype(np.int64)


def residual(g: Graph, config: PointConfig) -> float:
    """Largest edge defect ``| |x_u - x_v|^2 - 1 |``."""
    if config.n != g.n:
        raise InvalidInput(f"graph has {g.n} vertices but configuration has {config.n} points")
    if g.m == 0:
        return 0.0
    return float(edge_residual_max(config.points, g.edges[:, 0].copy(), g.edges[:, 1].copy()))


def _solve_once(g: Graph, d: int, x0: np.ndarray, pu, pv, max_nfev: int) -> np.ndarray:
    n = g.n
    eu = g.edges[:, 0].copy()
    ev = g.edges[:, 1].copy()
    r0sq = REPULSION_RADIUS ** 2
    sw = float(np.sqrt(REPULSION_WEIGHT))
    args = (n, d, eu, ev, pu, pv, r0sq, sw)
    # the repulsion rows grow like n^2, so large problems avoid dense SVDs
    sparse = n >= SPARSE_FROM
    sol = least_squares(
        residual_vector, x0.ravel(), jac=_sparse_jacobian if sparse else residual_jacobian, args=args,
        method="trf", tr_solver="lsmr" if sparse else "exact",
        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev,
    )
    x = sol.x
    # polish on the edge equations alone; the repulsion term is inactive at a good optimum
    empty = np.zeros(0, dtype=np.int64)
    args = (n, d, eu, ev, empty, empty, 0.0, 0.0)
    method = "lm" if g.m >= n * d else "trf"
    sol = least_squares(
        residual_vector, x, jac=residual_jacobian, args=args, method=method,
        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev,
    )
    return sol.x.reshape(n, d)


def embed_unit_distance(
    g: Graph,
    d: int,
    restarts: int = 50,
    seed: int = 0,
    residual_tol: float = RESIDUAL_TOL,
    separation_tol: float = SEPARATION_TOL,
    max_nfev: int = MAX_NFEV,
) -> EmbedResult:
    """Numerically place ``g`` in R^d with every edge of length 1.

    Restart ``r`` starts from uniform points in a box of side ``2 sqrt(n)``
    drawn from the stream ``(seed, r)``; the first restart that reaches the
    residual and separation tolerances wins.  Raises :class:`NoEmbeddingFound`
    otherwise, which says nothing about realizability.
    """
    if d < 1 or d > MAX_DIMENSION:
        raise InvalidInput(f"dimension must be in 1..{MAX_DIMENSION}")
    if g.n < 1:
        raise InvalidInput("graph must have at least one vertex")
    n = g.n
    if n == 1:
        return EmbedResult(PointConfig(np.zeros((1, d))), 0.0, 0)
    pu, pv = non_edges(g)
    half = np.sqrt(n)
    best = None
    for r in range(restarts):
        rng = trial_rng(seed, r, stream=7)
        x0 = rng.uniform(-half, half, size=(n, d))
        x = _solve_once(g, d, x0, pu, pv, max_nfev)
        if not np.all(np.isfinite(x)):
            continue
        sep = float(pdist(x).min())
        res = float(edge_residual_max(x, g.edges[:, 0].copy(), g.edges[:, 1].copy())) if g.m else 0.0
        if res <= residual_tol and sep >= separation_tol:
            return EmbedResult(PointConfig(x), res, r + 1)
        if best is None or res < best:
            best = res
    raise NoEmbeddingFound(f"no placement within {restarts} restarts (best residual {best})")


def compute_diameter_graph(config: PointConfig, rel_tol: float = 1e-9) -> Graph:
    """Pairs at (relative) maximum distance."""
    n = config.n
    if n < 2:
        raise InvalidInput("a diameter graph needs at least two points")
    dist = pdist(config.points)
    diam = float(dist.max())
    if diam <= 10.0 * config.min_separation * rel_tol:
        raise DegenerateDiameter("diameter is within tolerance of the minimum separation")
    iu, iv = np.triu_indices(n, 1)
    hit = dist >= (1.0 - rel_tol) * diam
    return Graph(n, np.column_stack([iu[hit], iv[hit]]))


def place_generic_forest(g: Graph, rng: np.random.Generator, d: int = 2, cycle_ok: bool = True) -> Optional[np.ndarray]:
    """Explicit unit placement of a graph whose components are trees or unicyclic.

    Unicyclic cores become regular polygons of side 1 (random orientation);
    trees hang off them along random unit directions.  Components are spread
    along the first axis.  Returns ``None`` if the graph has a multicyclic
    component or the random placement happens to collide.
    """
    from .graph import components, two_core_mask

    if d < 2:
        raise InvalidInput("generic placement needs d >= 2")
    x = np.zeros((g.n, d))
    core = two_core_mask(g) if g.m else np.zeros(g.n, dtype=bool)
    offset = 0.0
    for comp in components(g):
        verts = list(comp.vertices)
        placed = {}
        if comp.kind == "multicyclic":
            return None
        if comp.kind == "unicyclic":
            if not cycle_ok:
                return None
            cyc = _cycle_order(g, [v for v in verts if core[v]])
            L = len(cyc)
            R = 0.5 / np.sin(np.pi / L)
            phase = rng.uniform(0, 2 * np.pi)
            for i, v in enumerate(cyc):
                ang = phase + 2 * np.pi * i / L
                p = np.zeros(d)
                p[0], p[1] = R * np.cos(ang), R * np.sin(ang)
                placed[v] = p
            frontier = list(cyc)
        else:
            placed[verts[0]] = np.zeros(d)
            frontier = [verts[0]]
        while frontier:
            v = frontier.pop(0)
            for u in g.neighbors(v):
                if u in placed:
                    continue
                step = rng.normal(size=d)
                step /= np.linalg.norm(step)
                placed[u] = placed[v] + step
                frontier.append(u)
        block = np.array([placed[v] for v in verts])
        lo = block[:, 0].min()
        block[:, 0] += offset - lo
        offset = block[:, 0].max() + 2.0 + rng.uniform(0.0, 1.0)
        x[verts] = block
    if g.n > 1 and pdist(x).min() < SEPARATION_TOL:
        return None
    return x


def _cycle_order(g: Graph, cyc_vertices: list) -> list:
    cset = set(cyc_vertices)
    start = min(cyc_vertices)
    order = [start]
    prev = -1
    cur = start
    while True:
        nxt = [u for u in g.neighbors(cur) if u in cset and u != prev]
        nxt = [u for u in nxt if u not in order[1:]] if len(order) > 1 else nxt
        if not nxt:
            break
        u = min(nxt)
        if u == start:
            break
        order.append(u)
        prev, cur = cur, u
    return order
