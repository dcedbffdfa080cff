import math

import numpy as np
import pytest
from conftest import free_trees, random_graph
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from udlab.embed import (
    REPULSION_RADIUS,
    SPARSE_FROM,
    _sparse_jacobian,
    PointConfig,
    compute_diameter_graph,
    embed_unit_distance,
    non_edges,
    objective_and_gradient,
    read_points,
    residual,
    residual_jacobian,
    residual_vector,
    write_points,
)
from udlab.errors import DegenerateDiameter, InvalidInput, NoEmbeddingFound
from udlab.graph import Graph, complete_graph, cycle_graph, moser_spindle, path_graph


def _regular_polygon(k, radius=1.0):
    ang = 2 * np.pi * np.arange(k) / k
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang)])


def _unit_simplex(d):
    # standard basis vectors in R^(d+1) scaled to side 1, projected onto R^d
    e = np.eye(d + 1) / math.sqrt(2.0)
    centred = e - e.mean(axis=0)
    u, s, vt = np.linalg.svd(centred)
    return centred @ vt[:d].T


@pytest.mark.parametrize(
    "edges, pts, expected",
    [
        ([(0, 1)], [[0, 0], [1, 0]], 0.0),
        ([(0, 1)], [[0, 0], [2, 0]], 3.0),
    ],
)
def test_residual_examples(edges, pts, expected):
    assert residual(Graph(2, edges), PointConfig(np.array(pts, float))) == pytest.approx(expected)


def test_residual_equilateral():
    pts = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    assert residual(complete_graph(3), PointConfig(pts)) <= 1e-12


def test_residual_size_mismatch():
    with pytest.raises(InvalidInput):
        residual(path_graph(3), PointConfig(np.zeros((2, 2)) + [[0, 0], [1, 0]]))


def test_coincident_points_rejected():
    with pytest.raises(InvalidInput):
        PointConfig(np.array([[0.0, 0.0], [0.0, 0.0]]))


@given(st.integers(1, 8), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_point_text_round_trip(n, d, seed):
    pts = np.random.default_rng(seed).normal(size=(n, d)) * 1e3
    cfg = PointConfig(pts)
    back = PointConfig.from_text(cfg.to_text())
    assert np.array_equal(back.points, cfg.points)
    assert cfg.to_text().splitlines()[0] == f"{n} {d}"


def test_point_file_io(tmp_path):
    cfg = PointConfig(_regular_polygon(5))
    write_points(cfg, tmp_path / "p.txt")
    assert np.array_equal(read_points(tmp_path / "p.txt").points, cfg.points)


# -- objective derivatives ----------------------------------------------------

def _instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    d = int(rng.integers(1, 5))
    g = random_graph(rng, n)
    pu, pv = non_edges(g)
    # a small box puts many non-adjacent pairs inside the repulsion radius
    x = rng.uniform(-1, 1, size=n * d) * (0.12 if seed % 2 else 1.5)
    return g, n, d, pu, pv, x


def test_gradient_matches_central_differences():
    r0sq = REPULSION_RADIUS ** 2
    for seed in range(100):
        g, n, d, pu, pv, x = _instance(seed)
        eu, ev = g.edges[:, 0].copy(), g.edges[:, 1].copy()
        f, grad = objective_and_gradient(x, n, d, eu, ev, pu, pv, r0sq, 1.0)
        h = 1e-6
        fd = np.zeros_like(x)
        for i in range(x.shape[0]):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd[i] = (objective_and_gradient(xp, n, d, eu, ev, pu, pv, r0sq, 1.0)[0]
                     - objective_and_gradient(xm, n, d, eu, ev, pu, pv, r0sq, 1.0)[0]) / (2 * h)
        scale = max(np.linalg.norm(grad), 1e-8)
        assert np.linalg.norm(grad - fd) / scale < 1e-5, seed
        # the least-squares residual vector carries the same objective
        res = residual_vector(x, n, d, eu, ev, pu, pv, r0sq, 1.0)
        assert float(res @ res) == pytest.approx(f, rel=1e-12, abs=1e-14)


def test_jacobian_matches_central_differences():
    r0sq = REPULSION_RADIUS ** 2
    for seed in range(100):
        g, n, d, pu, pv, x = _instance(seed)
        eu, ev = g.edges[:, 0].copy(), g.edges[:, 1].copy()
        jac = residual_jacobian(x, n, d, eu, ev, pu, pv, r0sq, 1.0)
        h = 1e-6
        fd = np.zeros_like(jac)
        for i in range(x.shape[0]):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd[:, i] = (residual_vector(xp, n, d, eu, ev, pu, pv, r0sq, 1.0)
                        - residual_vector(xm, n, d, eu, ev, pu, pv, r0sq, 1.0)) / (2 * h)
        scale = max(np.linalg.norm(jac), 1e-8)
        assert np.linalg.norm(jac - fd) / scale < 1e-5, seed


def test_sparse_jacobian_equals_dense():
    r0sq = REPULSION_RADIUS ** 2
    for seed in range(100):
        g, n, d, pu, pv, x = _instance(seed)
        eu, ev = g.edges[:, 0].copy(), g.edges[:, 1].copy()
        dense = residual_jacobian(x, n, d, eu, ev, pu, pv, r0sq, 1.0)
        sparse = _sparse_jacobian(x, n, d, eu, ev, pu, pv, r0sq, 1.0)
        assert np.array_equal(sparse.toarray(), dense), seed


def test_large_graphs_take_the_sparse_path():
    # a long cycle is well above the switch and must still embed
    g = cycle_graph(2 * SPARSE_FROM + 1)
    _assert_success(g, embed_unit_distance(g, 2, restarts=20))


# -- embedder ---------------------------------------------------------------

def _assert_success(g, res):
    assert res.success
    assert residual(g, res.config) <= 1e-9
    assert res.config.min_separation >= 1e-6


def test_path_embeds():
    g = path_graph(3)
    _assert_success(g, embed_unit_distance(g, 2))


def test_triangle_is_equilateral():
    res = embed_unit_distance(complete_graph(3), 2)
    x = res.config.points
    dist = [np.linalg.norm(x[i] - x[j]) for i in range(3) for j in range(i + 1, 3)]
    assert np.allclose(dist, 1.0, atol=1e-9)


def test_moser_spindle_embeds():
    g = moser_spindle()
    _assert_success(g, embed_unit_distance(g, 2, restarts=200))


@pytest.mark.parametrize("n", range(1, 10))
def test_all_small_trees_embed(n):
    for t in free_trees(n):
        _assert_success(t, embed_unit_distance(t, 2, restarts=50))


def test_k4_in_plane_fails_honestly():
    with pytest.raises(NoEmbeddingFound):
        embed_unit_distance(complete_graph(4), 2, restarts=3)


def test_k4_in_space_is_tetrahedron():
    g = complete_graph(4)
    _assert_success(g, embed_unit_distance(g, 3))


def test_deterministic_for_seed():
    g = cycle_graph(6)
    a = embed_unit_distance(g, 2, seed=5).config.points
    b = embed_unit_distance(g, 2, seed=5).config.points
    assert np.array_equal(a, b)


# -- diameter graphs ----------------------------------------------------------

def test_triangle_diameter_graph():
    pts = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    assert compute_diameter_graph(PointConfig(pts)) == complete_graph(3)


def test_pentagon_diameter_graph_is_pentagram():
    g = compute_diameter_graph(PointConfig(_regular_polygon(5)))
    assert sorted(g.edge_list()) == sorted(tuple(sorted((i, (i + 2) % 5))) for i in range(5))


@pytest.mark.parametrize("d", range(1, 9))
def test_simplex_diameter_graph(d):
    pts = _unit_simplex(d)
    assert compute_diameter_graph(PointConfig(pts)) == complete_graph(d + 1)


@pytest.mark.parametrize("seed", range(10))
def test_diameter_graph_isometry_and_scale_invariant(seed):
    rng = np.random.default_rng(seed)
    k = 2 * int(rng.integers(1, 8)) + 1
    pts = np.column_stack([_regular_polygon(k), np.zeros(k)])
    base = compute_diameter_graph(PointConfig(pts))
    rot = Rotation.random(random_state=seed).as_matrix()
    moved = pts @ rot.T + rng.normal(size=3) * 10
    assert compute_diameter_graph(PointConfig(moved)) == base
    assert compute_diameter_graph(PointConfig(pts * rng.uniform(0.01, 100))) == base


def test_degenerate_diameter():
    pts = np.array([[0.0], [1e-12]])
    with pytest.raises(DegenerateDiameter):
        compute_diameter_graph(PointConfig(pts), rel_tol=0.5)
    with pytest.raises(InvalidInput):
        compute_diameter_graph(PointConfig(np.zeros((1, 2))))
