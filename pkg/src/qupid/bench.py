"""Timing harness for quantization and the discrete transforms.

All timings are wall-clock medians over repeated runs on synthetic
diagrams drawn from a seeded generator, so the workload is reproducible
even though the times are not.
"""

from __future__ import annotations

import statistics
import time
from typing import Callable, Sequence

import numpy as np

from .diagrams import LOG
from .quantize import build_grid, quantize_bp
from .transforms import TransformKind, transform_batch


def synthetic_bp(n_points: int, rng: np.random.Generator) -> np.ndarray:
    """Birth-persistence points spread over the unit square."""
    return rng.random((n_points, 2))


def median_time(fn: Callable[[], object], runs: int) -> float:
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def loglog_slope(sizes: Sequence[float], times: Sequence[float]) -> float | None:
    """Least-squares slope of ``log(time)`` against ``log(size)``; None if undefined."""
    pts = [(s, t) for s, t in zip(sizes, times) if s > 0 and t > 0]
    if len(pts) < 2:
        return None
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    if np.ptp(x) == 0:
        return None
    return float(np.polyfit(x, y, 1)[0])


def bench_quantize(sizes: Sequence[int], grid: tuple[int, int], runs: int = 20, seed: int = 0,
                   alpha=(500.0, 500.0)) -> dict:
    """Median time to quantize one diagram of each size on a fixed log grid."""
    rng = np.random.default_rng(seed)
    fit = synthetic_bp(1000, rng)
    g = build_grid(fit, grid[0], grid[1], LOG, alpha)
    rows = []
    for n in sizes:
        bp = synthetic_bp(n, rng)
        rows.append({"n_points": int(n), "median_s": median_time(lambda: quantize_bp(bp, g), runs)})
    ratios = [
        {"from": a["n_points"], "to": b["n_points"],
         "ratio": (b["median_s"] / a["median_s"]) if a["median_s"] > 0 else None}
        for a, b in zip(rows, rows[1:])
    ]
    return {
        "grid": list(grid),
        "runs": runs,
        "rows": rows,
        "ratios": ratios,
        "loglog_slope": loglog_slope([r["n_points"] for r in rows], [r["median_s"] for r in rows]),
    }


def bench_transforms(kinds: Sequence[str], grids: Sequence[tuple[int, int]], runs: int = 20,
                     seed: int = 0, batch: int = 1) -> dict:
    """Median time of each transform on random measures at each grid size.

    For the Fourier transform the ``n log n`` model ratio between
    consecutive grids is reported next to the measured ratio.
    """
    rng = np.random.default_rng(seed)
    out = []
    for name in kinds:
        kind = TransformKind.parse(name)
        rows = []
        for r, s in grids:
            m = rng.random((batch, r, s))
            rows.append({"grid": [r, s], "area": r * s,
                         "median_s": median_time(lambda: transform_batch(m, kind), runs)})
        ratios = []
        for a, b in zip(rows, rows[1:]):
            na, nb = a["area"], b["area"]
            model = (nb * np.log2(nb)) / (na * np.log2(na)) if na > 1 else None
            ratios.append({
                "from": a["grid"], "to": b["grid"],
                "ratio": (b["median_s"] / a["median_s"]) if a["median_s"] > 0 else None,
                "nlogn_model": float(model) if model is not None else None,
            })
        out.append({
            "transform": kind.name,
            "rows": rows,
            "ratios": ratios,
            "loglog_slope": loglog_slope([r["area"] for r in rows], [r["median_s"] for r in rows]),
        })
    return {"runs": runs, "batch": batch, "transforms": out}


def vectorize_throughput(n_diagrams: int, n_points: int, grid=(32, 32), kind: str = "coif2",
                         seed: int = 0, alpha=(500.0, 500.0)) -> dict:
    """Wall time to quantize and transform ``n_diagrams`` diagrams (grid fit excluded)."""
    rng = np.random.default_rng(seed)
    diagrams = [synthetic_bp(n_points, rng) for _ in range(n_diagrams)]
    g = build_grid(diagrams[0] if n_points else np.zeros((1, 2)), grid[0], grid[1], LOG, alpha)
    k = TransformKind.parse(kind)
    t0 = time.perf_counter()
    masses = np.zeros((n_diagrams, grid[0], grid[1]))
    for i, bp in enumerate(diagrams):
        masses[i], _ = quantize_bp(bp, g)
    feats = transform_batch(masses, k)
    elapsed = time.perf_counter() - t0
    return {"n_diagrams": n_diagrams, "n_points": n_points, "grid": list(grid), "transform": k.name,
            "n_features": int(feats.shape[1]), "seconds": elapsed}
