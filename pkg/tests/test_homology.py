import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import brute_rips_pairs, mst_weight

from qupid.homology import (
    PointCloud,
    SimplexBudgetError,
    WeightedGraph,
    extend_to_edges,
    graph_sublevel_persistence,
    graph_superlevel_persistence,
    hks,
    jacobi_eigh,
    laplacian_spectrum,
    normalized_laplacian,
    read_graph,
    reflect,
    rips_h0,
    rips_h1,
    write_graph,
)

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def _sorted(d):
    return sorted(map(tuple, d.points.tolist()))


def _circle(n, radius=1.0):
    t = 2 * np.pi * np.arange(n) / n
    return np.c_[radius * np.cos(t), radius * np.sin(t)]


# ------------------------------------------------------------------ Rips H0


def test_h0_examples():
    assert _sorted(rips_h0([(0.0, 0.0)])) == [(0.0, math.inf)]
    assert _sorted(rips_h0([(0.0, 0.0), (1.0, 0.0)])) == [(0.0, 1.0), (0.0, math.inf)]
    assert _sorted(rips_h0(np.array([[0.0], [1.0], [3.0]]))) == [(0.0, 1.0), (0.0, 2.0), (0.0, math.inf)]


@given(st.integers(1, 25), st.integers(0, 2**32 - 1))
def test_h0_size_and_mst_weight(n, seed):
    pts = np.random.default_rng(seed).random((n, 2))
    d = rips_h0(pts)
    assert len(d) == n
    assert d.n_essential == 1
    finite = d.points[np.isfinite(d.points[:, 1]), 1]
    assert finite.sum() == pytest.approx(mst_weight(pts), rel=1e-12, abs=1e-12)


def test_h0_drops_zero_length_merges():
    d = rips_h0([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)])
    assert _sorted(d) == [(0.0, 1.0), (0.0, math.inf)]


# ------------------------------------------------------------------ Rips H1


def test_h1_equilateral_is_empty():
    pts = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]
    assert len(rips_h1(pts, 2.0)) == 0


def test_h1_unit_square():
    d = rips_h1(SQUARE, 2.0)
    assert len(d) == 1
    b, de = d.points[0]
    assert abs(b - 1) <= 1e-9 and abs(de - math.sqrt(2)) <= 1e-9


def test_h1_square_truncated_before_death_is_dropped():
    assert len(rips_h1(SQUARE, 1.2)) == 0


def test_h1_circle_has_one_long_class():
    d = rips_h1(_circle(50), 2.0)
    pers = d.points[:, 1] - d.points[:, 0]
    assert int(np.sum(pers > 0.5)) == 1


def test_h1_small_circle_matches_brute_force():
    pts = _circle(12)
    _, ref = brute_rips_pairs(pts, 2.0)
    assert _sorted(rips_h1(pts, 2.0)) == ref


@pytest.mark.parametrize("seed", range(50))
def test_h1_matches_dense_reduction(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 13))
    pts = rng.random((n, 2))
    scale = float(rng.uniform(0.3, 1.5))
    h0_ref, h1_ref = brute_rips_pairs(pts, scale)
    assert _sorted(rips_h1(pts, scale)) == h1_ref
    finite_h0 = [p for p in _sorted(rips_h0(pts)) if math.isfinite(p[1]) and p[1] <= scale]
    assert finite_h0 == h0_ref


def test_h1_budget_guard():
    pts = np.random.default_rng(0).random((40, 2))
    with pytest.raises(SimplexBudgetError) as err:
        rips_h1(pts, 1.5, max_triangles=100)
    assert err.value.suggested < 1.5
    assert "max_scale" in str(err.value)


def test_h1_rejects_bad_scale():
    with pytest.raises(ValueError):
        rips_h1(SQUARE, 0.0)


def test_point_cloud_validation():
    with pytest.raises(ValueError):
        PointCloud([[0.0, math.nan]])


# ------------------------------------------------------------------ graphs and HKS


def _complete(n):
    return WeightedGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def _random_graph(rng, n):
    mask = np.triu(rng.random((n, n)) < 0.3, 1)
    return WeightedGraph(n, np.argwhere(mask))


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 0)])
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        WeightedGraph(2, [(0, 2)])


def test_hks_single_vertex():
    assert hks(WeightedGraph(1, np.zeros((0, 2))), 3.0).tolist() == [1.0]


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_hks_two_vertices(t):
    h = hks(WeightedGraph(2, [(0, 1)]), t)
    np.testing.assert_allclose(h, 0.5 + 0.5 * math.exp(-2 * t), atol=1e-12, rtol=0)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_hks_triangle(t):
    h = hks(_complete(3), t)
    np.testing.assert_allclose(h, 1 / 3 + 2 / 3 * math.exp(-1.5 * t), atol=1e-12, rtol=0)


@pytest.mark.parametrize("seed", range(50))
def test_hks_trace_identity(seed):
    rng = np.random.default_rng(seed)
    g = _random_graph(rng, int(rng.integers(1, 31)))
    lam, _ = laplacian_spectrum(g)
    for t in (0.1, 10.0):
        assert hks(g, t).sum() == pytest.approx(np.exp(-t * lam).sum(), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_jacobi_matches_numpy(seed):
    rng = np.random.default_rng(100 + seed)
    g = _random_graph(rng, 25)
    L = normalized_laplacian(g)
    lam, vec = jacobi_eigh(L)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(L), atol=1e-10)
    np.testing.assert_allclose(vec @ np.diag(lam) @ vec.T, L, atol=1e-10)
    np.testing.assert_allclose(vec.T @ vec, np.eye(25), atol=1e-10)
    assert lam.min() >= -1e-9 and lam.max() <= 2 + 1e-9


def test_hks_range_and_monotone_trace():
    rng = np.random.default_rng(7)
    g = _random_graph(rng, 20)
    spectrum = laplacian_spectrum(g)
    prev = math.inf
    for t in (0.01, 0.1, 1.0, 5.0, 20.0):
        h = hks(g, t, spectrum)
        assert np.all(h > 0) and np.all(h <= 1 + 1e-12)
        assert h.sum() <= prev + 1e-12
        prev = h.sum()


def test_isolated_vertex_convention():
    g = WeightedGraph(3, [(0, 1)])
    L = normalized_laplacian(g)
    assert L[2].tolist() == [0, 0, 0]
    assert hks(g, 2.0)[2] == pytest.approx(1.0)


def test_extend_to_edges():
    assert extend_to_edges(WeightedGraph(2, [(0, 1)]), [1, 3]).tolist() == [3]
    assert extend_to_edges(_complete(3), [2, 2, 2]).tolist() == [2, 2, 2]
    assert extend_to_edges(WeightedGraph(3, [(0, 1), (1, 2)]), [0, 2, 1]).tolist() == [2, 2]


def test_sublevel_examples():
    path = WeightedGraph(3, [(0, 1), (1, 2)])
    h0, h1 = graph_sublevel_persistence(path, [0, 1, 2])
    assert _sorted(h0) == [(0.0, math.inf)] and len(h1) == 0
    h0, h1 = graph_sublevel_persistence(WeightedGraph(2, [(0, 1)]), [0, 1])
    assert _sorted(h0) == [(0.0, math.inf)]
    h0, h1 = graph_sublevel_persistence(_complete(3), [0, 0, 0])
    assert _sorted(h0) == [(0.0, math.inf)]
    assert _sorted(h1) == [(0.0, math.inf)]


def test_sublevel_elder_rule():
    # two minima joined at the top; the younger (birth 1) dies at 3
    g = WeightedGraph(3, [(0, 2), (1, 2)])
    h0, _ = graph_sublevel_persistence(g, [0, 1, 3])
    assert _sorted(h0) == [(0.0, math.inf), (1.0, 3.0)]


def test_superlevel_examples():
    g = _complete(3)
    assert graph_superlevel_persistence(g, [2, 2, 2]) == graph_sublevel_persistence(g, [2, 2, 2])
    path = WeightedGraph(3, [(0, 1), (1, 2)])
    h0, h1 = graph_superlevel_persistence(path, [0, 1, 2])
    # reported in reflected units; the surviving class is born at the maximum
    assert _sorted(h0) == [(0.0, math.inf)] and len(h1) == 0
    assert reflect([0, 1, 2]).tolist() == [2, 1, 0]
    h0, _ = graph_superlevel_persistence(WeightedGraph(1, np.zeros((0, 2))), [0.7])
    assert _sorted(h0) == [(0.7, math.inf)]


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=20))
def test_reflect_stays_in_range(values):
    f = np.array(values)
    r = reflect(f)
    assert r.min() >= f.min() and r.max() <= f.max()


def test_superlevel_two_maxima():
    g = WeightedGraph(3, [(0, 2), (1, 2)])
    h0, _ = graph_superlevel_persistence(g, [3, 2, 0])
    # reflection: f' = 3 - f = (0, 1, 3); peaks at 3 and 2 merge at 0
    assert _sorted(h0) == [(0.0, math.inf), (1.0, 3.0)]


@pytest.mark.parametrize("seed", range(20))
def test_betti_one_count(seed):
    rng = np.random.default_rng(seed)
    g = _random_graph(rng, int(rng.integers(1, 20)))
    f = rng.random(g.n_vertices)
    h0, h1 = graph_sublevel_persistence(g, f)
    adj = g.adjacency()
    # count components by flood fill
    seen, comps = set(), 0
    for s in range(g.n_vertices):
        if s in seen:
            continue
        comps += 1
        stack = [s]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(np.flatnonzero(adj[u]).tolist())
    assert len(h1) == g.n_edges - g.n_vertices + comps
    assert h0.n_essential == comps


def test_graph_file_round_trip(tmp_path):
    g = WeightedGraph(4, [(0, 1), (2, 3), (1, 3)])
    write_graph(tmp_path / "g.txt", g)
    back = read_graph(tmp_path / "g.txt")
    assert back.n_vertices == 4 and back.edges.tolist() == g.edges.tolist()
