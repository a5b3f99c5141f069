"""Vietoris-Rips persistence in degrees 0 and 1 for small point clouds.

Edges enter at their Euclidean length; a triangle enters at its longest
edge. Simplices are ordered by ``(value, dimension, vertex tuple)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..diagrams import PersistenceDiagram

MAX_TRIANGLES = 10_000_000


class SimplexBudgetError(RuntimeError):
    """Raised when a Rips complex would exceed the triangle budget."""

    def __init__(self, n_triangles: int, max_scale: float, suggested: float):
        self.n_triangles = n_triangles
        self.max_scale = max_scale
        self.suggested = suggested
        super().__init__(
            f"Rips complex at max_scale={max_scale:g} has {n_triangles} triangles "
            f"(budget {MAX_TRIANGLES}); try max_scale <= {suggested:.4g}"
        )


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise ValueError("a point cloud is an (n, d) array with d >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def _points(cloud) -> np.ndarray:
    return cloud.points if isinstance(cloud, PointCloud) else PointCloud(cloud).points


def pairwise_distances(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def sorted_edges(dist: np.ndarray, max_scale: float = np.inf) -> tuple[np.ndarray, np.ndarray]:
    """Edges ``(i, j)``, ``i < j``, with length ``<= max_scale`` in filtration order."""
    iu, ju = np.triu_indices(dist.shape[0], k=1)
    w = dist[iu, ju]
    keep = w <= max_scale
    iu, ju, w = iu[keep], ju[keep], w[keep]
    order = np.lexsort((ju, iu, w))
    return np.stack((iu[order], ju[order]), axis=1), w[order]


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root


def rips_h0(cloud) -> PersistenceDiagram:
    """Degree-0 diagram via Kruskal: one ``(0, w)`` per merge plus ``(0, inf)``.

    Zero-length merges (duplicate points) are dropped.
    """
    pts = _points(cloud)
    n = pts.shape[0]
    if n < 1:
        raise ValueError("rips_h0 needs at least one point")
    edges, w = sorted_edges(pairwise_distances(pts))
    uf = UnionFind(n)
    deaths = []
    merges = 0
    for (i, j), length in zip(edges.tolist(), w.tolist()):
        ri, rj = uf.find(i), uf.find(j)
        if ri == rj:
            continue
        uf.parent[max(ri, rj)] = min(ri, rj)
        merges += 1
        if length > 0:
            deaths.append(length)
        if merges == n - 1:
            break
    pairs = [(0.0, d) for d in deaths] + [(0.0, np.inf)]
    return PersistenceDiagram(np.array(pairs), 0)


def count_triangles(adj: np.ndarray) -> int:
    a = adj.astype(np.int64)
    return int(np.trace(a @ a @ a) // 6)


def rips_h1(cloud, max_scale: float, max_triangles: int = MAX_TRIANGLES) -> PersistenceDiagram:
    """Degree-1 diagram of the Rips filtration truncated at ``max_scale``.

    Boundary-matrix reduction over GF(2) with columns stored as integer
    bitsets over the edge order. Cycles still alive at ``max_scale`` are
    dropped, as are zero-persistence pairs.
    """
    if not max_scale > 0:
        raise ValueError("max_scale must be positive")
    pts = _points(cloud)
    n = pts.shape[0]
    dist = pairwise_distances(pts)
    edges, w = sorted_edges(dist, max_scale)
    if edges.shape[0] == 0:
        return PersistenceDiagram(np.zeros((0, 2)), 1)

    adj = np.zeros((n, n), dtype=bool)
    adj[edges[:, 0], edges[:, 1]] = True
    adj[edges[:, 1], edges[:, 0]] = True
    n_tri = count_triangles(adj)
    if n_tri > max_triangles:
        suggested = max_scale * (max_triangles / n_tri) ** 0.25 * 0.9
        raise SimplexBudgetError(n_tri, max_scale, suggested)

    edge_pos = np.full((n, n), -1, dtype=np.int64)
    edge_pos[edges[:, 0], edges[:, 1]] = np.arange(edges.shape[0])

    # positive edges close a cycle in the union-find sense
    uf = UnionFind(n)
    positive = np.zeros(edges.shape[0], dtype=bool)
    for e, (i, j) in enumerate(edges.tolist()):
        ri, rj = uf.find(i), uf.find(j)
        if ri == rj:
            positive[e] = True
        else:
            uf.parent[max(ri, rj)] = min(ri, rj)
    if not positive.any():
        return PersistenceDiagram(np.zeros((0, 2)), 1)

    tris = []
    for i, j in edges.tolist():
        common = np.flatnonzero(adj[i] & adj[j])
        for k in common[common > j].tolist():
            a, b, c = edge_pos[i, j], edge_pos[i, k], edge_pos[j, k]
            tris.append((max(a, b, c), i, j, k, a, b, c))
    if not tris:
        return PersistenceDiagram(np.zeros((0, 2)), 1)
    tri = np.array(tris, dtype=np.int64)
    # the longest edge has the largest filtration position, so sorting by it
    # orders triangles by (value, vertex tuple) up to value ties across edges
    tri_val = w[tri[:, 0]]
    order = np.lexsort((tri[:, 3], tri[:, 2], tri[:, 1], tri_val))
    tri = tri[order]

    pivots: dict[int, int] = {}
    pairs = []
    n_positive_left = int(positive.sum())
    for row in tri.tolist():
        col = (1 << row[4]) | (1 << row[5]) | (1 << row[6])
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                birth, death = w[low], w[row[0]]
                if death > birth:
                    pairs.append((birth, death))
                n_positive_left -= 1
                break
            col ^= other
        if n_positive_left == 0:
            break
    return PersistenceDiagram(np.array(pairs, dtype=float).reshape(-1, 2), 1)


def rips_diagrams(cloud, max_scale: float) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    return rips_h0(cloud), rips_h1(cloud, max_scale)
