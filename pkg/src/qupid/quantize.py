"""Grid fitting and binning of birth-persistence diagrams."""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from .diagrams import (
    DROP,
    LOG,
    UNIFORM,
    GridSpec,
    InfinitePolicy,
    PersistenceDiagram,
    QuantizedMeasure,
    to_birth_persistence,
)

log = logging.getLogger(__name__)

DEFAULT_ALPHA_CANDIDATES = (1.0, 10.0, 100.0, 500.0, 1000.0)


def log_rescale(pt, alpha) -> float:
    """Scalar score ``log(1 + b*alpha_1 + p*alpha_2)`` of a birth-persistence point."""
    b, p = float(pt[0]), float(pt[1])
    return math.log1p(b * alpha[0] + p * alpha[1])


def _as_bp(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2))
    return arr.reshape(-1, 2)


def _equispaced(lo: float, hi: float, n: int) -> np.ndarray:
    span = hi - lo
    if span <= 0:
        # degenerate axis: unit-width bins so the edges stay strictly increasing
        span = 1.0 if n > 1 else 0.0
    edges = lo + np.arange(n) * (span / n)
    edges[0] = lo
    return edges


def _check_fit_args(points, r: int, s: int) -> np.ndarray:
    pts = _as_bp(points)
    if r < 1 or s < 1:
        raise ValueError("grid needs r >= 1 and s >= 1")
    if pts.shape[0] == 0:
        raise ValueError("no points to fit grid")
    if not np.all(np.isfinite(pts)):
        raise ValueError("grid fitting needs finite points; resolve essential classes first")
    return pts


def build_uniform_grid(training_points, r: int, s: int) -> GridSpec:
    """``r`` x ``s`` equispaced edges from the minimum to the maximum of each axis.

    The maximum falls in the last (unbounded) bin.
    """
    pts = _check_fit_args(training_points, r, s)
    b = _equispaced(pts[:, 0].min(), pts[:, 0].max(), r)
    p = _equispaced(pts[:, 1].min(), pts[:, 1].max(), s)
    return GridSpec(b, p, UNIFORM, None)


def _log_axis(values: np.ndarray, n: int, a: float) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if lo < 0:
        raise ValueError("log-scaled grids need non-negative coordinates")
    u = _equispaced(math.log1p(a * lo), math.log1p(a * hi), n)
    edges = np.expm1(u) / a
    edges[0] = lo
    return edges


def build_log_grid(training_points, r: int, s: int, alpha) -> GridSpec:
    """Edges equispaced after rescaling ``b -> log(1 + a1*b)`` and ``p -> log(1 + a2*p)``.

    Each axis is rescaled independently, split evenly in rescaled
    coordinates, and the edges are mapped back through ``(exp(u) - 1) / a``.
    """
    a1, a2 = float(alpha[0]), float(alpha[1])
    if a1 <= 0 or a2 <= 0:
        raise ValueError("alpha entries must be positive")
    pts = _check_fit_args(training_points, r, s)
    b = _log_axis(pts[:, 0], r, a1)
    p = _log_axis(pts[:, 1], s, a2)
    return GridSpec(b, p, LOG, (a1, a2))


def build_grid(training_points, r: int, s: int, scaling: str = UNIFORM, alpha=None) -> GridSpec:
    if scaling == UNIFORM:
        return build_uniform_grid(training_points, r, s)
    if scaling == LOG:
        if alpha is None:
            raise ValueError("log scaling needs alpha")
        return build_log_grid(training_points, r, s, alpha)
    raise ValueError(f"unknown scaling {scaling!r}")


def bin_indices(bp: np.ndarray, grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bin row/column of every point and a mask of points inside the grid."""
    bp = _as_bp(bp)
    i = np.searchsorted(grid.b_edges, bp[:, 0], side="right") - 1
    j = np.searchsorted(grid.p_edges, bp[:, 1], side="right") - 1
    inside = (i >= 0) & (j >= 0)
    return i, j, inside


def quantize_bp(bp, grid: GridSpec) -> tuple[np.ndarray, int]:
    """Count points per half-open box; returns ``(masses, n_discarded)``."""
    r, s = grid.shape
    i, j, inside = bin_indices(bp, grid)
    flat = i[inside] * s + j[inside]
    masses = np.bincount(flat, minlength=r * s).astype(float).reshape(r, s)
    return masses, int(inside.size - np.count_nonzero(inside))


def quantize(d: PersistenceDiagram, grid: GridSpec, infinite_policy: InfinitePolicy = DROP) -> QuantizedMeasure:
    """Quantized measure of ``d`` on ``grid``.

    Points left of the first birth edge or below the first persistence edge
    are discarded (and counted in the debug log).
    """
    bp = to_birth_persistence(d, infinite_policy)
    masses, dropped = quantize_bp(bp, grid)
    if dropped:
        log.debug("quantize: %d point(s) outside grid discarded", dropped)
    return QuantizedMeasure(masses, grid)


def quantize_many(diagrams: Sequence[PersistenceDiagram], grid: GridSpec, infinite_policy: InfinitePolicy = DROP) -> np.ndarray:
    """Stack of quantized masses, shape ``(len(diagrams), r, s)``."""
    r, s = grid.shape
    out = np.zeros((len(diagrams), r, s))
    dropped = 0
    for k, d in enumerate(diagrams):
        out[k], n = quantize_bp(to_birth_persistence(d, infinite_policy), grid)
        dropped += n
    if dropped:
        log.warning("quantize: %d point(s) outside the fitted grid discarded", dropped)
    return out
