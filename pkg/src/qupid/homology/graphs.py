"""Heat kernel signatures on graphs and lower-star graph persistence."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..diagrams import PersistenceDiagram

JACOBI_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    n_vertices: int
    edges: np.ndarray

    def __post_init__(self):
        if self.n_vertices < 0:
            raise ValueError("n_vertices must be non-negative")
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= self.n_vertices:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
            e = np.sort(e, axis=1)
            if np.unique(e, axis=0).shape[0] != e.shape[0]:
                raise ValueError("duplicate edges are not allowed")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_vertices, self.n_vertices))
        if self.n_edges:
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a


def _check_function(g: WeightedGraph, f) -> np.ndarray:
    f = np.asarray(f, dtype=float).ravel()
    if f.size != g.n_vertices:
        raise ValueError(f"vertex function has {f.size} values for {g.n_vertices} vertices")
    if not np.all(np.isfinite(f)):
        raise ValueError("vertex function must be finite")
    return f


def normalized_laplacian(g: WeightedGraph) -> np.ndarray:
    """``I - D^-1/2 A D^-1/2``; isolated vertices get a zero row and column."""
    a = g.adjacency()
    deg = a.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    lap = -(inv_sqrt[:, None] * a * inv_sqrt[None, :])
    lap[np.diag_indices_from(lap)] += nz.astype(float)
    return lap


def off_diagonal_norm(a: np.ndarray) -> float:
    # summed directly: total minus diagonal energy cancels catastrophically
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return math.sqrt(float(np.dot(off, off)))


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns ascending eigenvalues and the matching orthonormal eigenvectors
    as columns. Sweeps stop once the off-diagonal Frobenius norm is ``<= tol``.
    """
    A = np.array(a, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("jacobi_eigh needs a square matrix")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    for _ in range(max_sweeps):
        if off_diagonal_norm(A) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau  # tau * tau would overflow
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                colp, colq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp, rowq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        if off_diagonal_norm(A) > tol:
            raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def laplacian_spectrum(g: WeightedGraph) -> tuple[np.ndarray, np.ndarray]:
    return jacobi_eigh(normalized_laplacian(g))


def hks(g: WeightedGraph, t: float, spectrum=None) -> np.ndarray:
    """Heat kernel signature ``sum_k exp(-t lam_k) psi_k(v)^2`` at every vertex."""
    if not t > 0:
        raise ValueError("diffusion time must be positive")
    lam, psi = laplacian_spectrum(g) if spectrum is None else spectrum
    return (psi ** 2) @ np.exp(-t * lam)


def extend_to_edges(g: WeightedGraph, f) -> np.ndarray:
    f = _check_function(g, f)
    if g.n_edges == 0:
        return np.zeros(0)
    return np.maximum(f[g.edges[:, 0]], f[g.edges[:, 1]])


def graph_sublevel_persistence(g: WeightedGraph, f) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    """Lower-star persistence of ``f`` in degrees 0 and 1.

    Components merge by the elder rule (smaller birth survives, then smaller
    founding vertex). Every cycle-closing edge starts a 1-class; essential
    classes have death ``+inf`` and are resolved later by an infinite policy
    (typically clamping to ``max(f)``). Zero-persistence pairs are dropped.
    """
    f = _check_function(g, f)
    n = g.n_vertices
    ev = extend_to_edges(g, f)
    edges = g.edges
    order = np.lexsort((edges[:, 1], edges[:, 0], ev)) if g.n_edges else np.zeros(0, dtype=np.int64)

    parent = list(range(n))
    birth = f.tolist()
    founder = list(range(n))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    h0, h1 = [], []
    # an edge always follows its endpoints (its value is their max, and
    # vertices precede edges at equal value), so edges can be swept alone
    for e in order.tolist():
        u, v = int(edges[e, 0]), int(edges[e, 1])
        val = float(ev[e])
        ru, rv = find(u), find(v)
        if ru == rv:
            h1.append((val, math.inf))
            continue
        if (birth[ru], founder[ru]) > (birth[rv], founder[rv]):
            ru, rv = rv, ru
        # rv is younger and dies
        if val > birth[rv]:
            h0.append((birth[rv], val))
        parent[rv] = ru
    for x in range(n):
        if find(x) == x:
            h0.append((birth[x], math.inf))
    return (
        PersistenceDiagram(np.array(h0, dtype=float).reshape(-1, 2), 0),
        PersistenceDiagram(np.array(h1, dtype=float).reshape(-1, 2), 1),
    )


def reflect(f) -> np.ndarray:
    """``max(f) + min(f) - f``: order-reversing, same range as ``f``."""
    f = np.asarray(f, dtype=float)
    if f.size == 0:
        return f.copy()
    lo, hi = f.min(), f.max()
    # clipped: the sum can round one ulp outside [lo, hi]
    return np.clip((hi + lo) - f, lo, hi)


def graph_superlevel_persistence(g: WeightedGraph, f) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    """Superlevel-set persistence, computed as sublevel persistence of the reflected function.

    Values are reported in reflected units ``max(f) + min(f) - f`` so that
    births stay below deaths and inside the range of ``f``.
    """
    f = _check_function(g, f)
    return graph_sublevel_persistence(g, reflect(f))


def read_graph(path) -> WeightedGraph:
    """Graph file: first line ``n_vertices``, then one ``u v`` line per edge (0-indexed)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty graph file")
    n = int(lines[0][0])
    edges = [(int(a), int(b)) for a, b in lines[1:]]
    return WeightedGraph(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


def write_graph(path, g: WeightedGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n_vertices}\n")
        for u, v in g.edges.tolist():
            fh.write(f"{u} {v}\n")
