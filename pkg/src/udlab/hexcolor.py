"""Periodic 7-colorings of the plane and low-chromatic induced subgraphs.

The plane is tiled by regular hexagons of side ``s``; hexagon centres form a
triangular lattice with spacing ``s*sqrt(3)`` and the hexagon at lattice
coordinates ``(i, j)`` gets color ``(i + 3j) mod 7``.  For
``1/sqrt(7) < s < 1/2`` no color class contains two points at distance 1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .embed import PointConfig
from .errors import InadmissibleColoring, InvalidInput
from .graph import Graph
from .rng import trial_rng

S_MIN = 1.0 / math.sqrt(7.0)
S_MAX = 0.5
KAPPA = 4.36
N_COLORS = 7


@dataclass(frozen=True)
class HexColoring:
    s: float
    offset: tuple = (0.0, 0.0)
    rotation: float = 0.0

    @property
    def admissible(self) -> bool:
        return S_MIN < self.s < S_MAX

    @property
    def spacing(self) -> float:
        return self.s * math.sqrt(3.0)

    def lattice_coords(self, pts: np.ndarray) -> np.ndarray:
        """Integer coordinates ``(i, j)`` of the hexagon containing each point."""
        pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
        c, sn = math.cos(self.rotation), math.sin(self.rotation)
        rel = pts - np.asarray(self.offset, dtype=np.float64)
        q = np.column_stack([c * rel[:, 0] + sn * rel[:, 1], -sn * rel[:, 0] + c * rel[:, 1]])
        a = self.spacing
        basis = np.array([[a, 0.0], [a / 2.0, a * math.sqrt(3.0) / 2.0]])  # rows b1, b2
        frac = q @ np.linalg.inv(basis)
        base = np.floor(frac).astype(np.int64)
        best = np.full(q.shape[0], np.inf)
        out = np.zeros((q.shape[0], 2), dtype=np.int64)
        # the nearest lattice point lies on the enclosing rhombus (two acute triangles)
        for di in (0, 1):
            for dj in (0, 1):
                cand = base + np.array([di, dj])
                centre = cand @ basis
                dist = np.sum((q - centre) ** 2, axis=1)
                take = dist < best
                best = np.where(take, dist, best)
                out[take] = cand[take]
        return out

    def colors(self, pts: np.ndarray) -> np.ndarray:
        ij = self.lattice_coords(pts)
        return np.mod(ij[:, 0] + 3 * ij[:, 1], N_COLORS)

    def to_dict(self) -> dict:
        return {"s": self.s, "offset": list(self.offset), "rotation": self.rotation}


def _points_array(points) -> np.ndarray:
    if isinstance(points, PointConfig):
        if points.d != 2:
            raise InvalidInput("plane colorings need planar points")
        return np.asarray(points.points)
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInput("expected an (n, 2) array of points")
    return arr


def build_unit_distance_graph(points, tol: float = 1e-9) -> Graph:
    """Edges are the pairs at distance within ``tol`` of 1."""
    pts = _points_array(points)
    n = pts.shape[0]
    if n < 2:
        return Graph(n)
    pairs = cKDTree(pts).query_pairs(1.0 + tol, output_type="ndarray")
    if pairs.shape[0] == 0:
        return Graph(n)
    dist = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
    keep = np.abs(dist - 1.0) <= tol
    return Graph(n, pairs[keep])


def color_points(points, coloring: HexColoring) -> np.ndarray:
    if not coloring.admissible:
        raise InadmissibleColoring(f"side {coloring.s} outside ({S_MIN:.6f}, {S_MAX})")
    return coloring.colors(_points_array(points))


@dataclass
class ExtractionResult:
    selected: tuple
    k: int
    n: int
    captured_fraction: float
    guarantee_met: bool
    kappa_ratio: float
    coloring: dict = field(default_factory=dict)
    classes: tuple = ()
    trials: int = 0

    @property
    def size(self) -> int:
        return len(self.selected)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["selected"] = list(self.selected)
        out["classes"] = list(self.classes)
        return out


def _random_coloring(rng: np.random.Generator) -> HexColoring:
    s = S_MIN + (S_MAX - S_MIN) * (0.02 + 0.96 * rng.random())
    a = s * math.sqrt(3.0)
    off = rng.random(2) * a
    rot = rng.random() * math.pi / 3.0
    return HexColoring(float(s), (float(off[0]), float(off[1])), float(rot))


def extract_low_chromatic_subgraph(points, k: int, trials: int = 200, seed: int = 0) -> ExtractionResult:
    """Best union of the ``k`` largest color classes over random admissible colorings.

    Any single admissible coloring already captures ``ceil(k n / 7)`` points
    (the top k of 7 classes), and the induced unit-distance subgraph on them
    is properly colored by the at most ``k`` classes used.
    """
    if not 1 <= k <= N_COLORS:
        raise InvalidInput(f"k must be in 1..{N_COLORS}")
    pts = _points_array(points)
    n = pts.shape[0]
    best = None
    for t in range(max(1, trials)):
        hexc = _random_coloring(trial_rng(seed, t, stream=3))
        cols = color_points(pts, hexc)
        counts = np.bincount(cols, minlength=N_COLORS)
        top = np.argsort(-counts, kind="stable")[:k]
        size = int(counts[top].sum())
        if best is None or size > best[0]:
            best = (size, hexc, cols, tuple(sorted(int(c) for c in top)))
    size, hexc, cols, classes = best
    selected = tuple(int(v) for v in np.flatnonzero(np.isin(cols, classes)))
    need = math.ceil(k * n / N_COLORS)
    return ExtractionResult(
        selected=selected,
        k=k,
        n=n,
        captured_fraction=size / n if n else 1.0,
        guarantee_met=size >= need,
        kappa_ratio=size / (k * n / KAPPA) if n else 1.0,
        coloring=hexc.to_dict(),
        classes=classes,
        trials=max(1, trials),
    )


def selected_coloring(points, result: ExtractionResult) -> np.ndarray:
    """Colors (relabelled to 0..k-1) witnessing chi <= k on the selected points."""
    hexc = HexColoring(result.coloring["s"], tuple(result.coloring["offset"]), result.coloring["rotation"])
    cols = color_points(_points_array(points)[list(result.selected)], hexc)
    remap = {c: i for i, c in enumerate(result.classes)}
    return np.array([remap[int(c)] for c in cols], dtype=np.int64)
