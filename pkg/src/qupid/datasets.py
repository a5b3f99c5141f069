"""Synthetic point-cloud datasets and the on-disk dataset layout.

Layout::

    <root>/manifest.json
    <root>/clouds/<label>/<index>.csv     one point per row, no header

The same layout is expected for externally supplied clouds (e.g. the
immune-cell data); graphs use ``graphs/<label>/<index>.txt``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .homology.rips import PointCloud
from .rng import Xoshiro256, derive_seed

ORBIT_RHOS = (2.5, 3.5, 4.0, 4.1, 4.3)
PATTERN_CLASSES = ("circles", "clusters", "uniform")


@dataclass(frozen=True)
class OrbitParams:
    rho: float
    n_points: int
    seed: int = 0

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be at least 1")
        if not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass
class LabeledCloudSet:
    clouds: list
    labels: list
    class_names: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.clouds) != len(self.labels):
            raise ValueError("clouds and labels differ in length")
        n_classes = len(self.class_names) if self.class_names else (max(self.labels) + 1 if self.labels else 0)
        if any(not 0 <= y < n_classes for y in self.labels):
            raise ValueError("label out of range")

    def __len__(self) -> int:
        return len(self.clouds)


def orbit_points(rho: float, n_points: int, x0: float, y0: float) -> np.ndarray:
    """Iterate ``x += rho*y*(1-y) mod 1`` then ``y += rho*x*(1-x) mod 1`` (with the new ``x``)."""
    out = np.empty((n_points, 2))
    x, y = x0, y0
    out[0] = (x, y)
    for k in range(1, n_points):
        x = (x + rho * y * (1.0 - y)) % 1.0
        y = (y + rho * x * (1.0 - x)) % 1.0
        out[k] = (x, y)
    return out


def generate_orbit(p: OrbitParams, start: tuple[float, float] | None = None) -> PointCloud:
    """One ORBIT cloud; the start point is drawn uniformly from ``[0, 1)^2`` unless forced."""
    if start is None:
        rng = Xoshiro256(p.seed)
        start = (rng.random(), rng.random())
    return PointCloud(orbit_points(p.rho, p.n_points, float(start[0]), float(start[1])))


def generate_orbit_dataset(rhos: Sequence[float], per_class: int, n_points: int, seed: int) -> LabeledCloudSet:
    clouds, labels = [], []
    for c, rho in enumerate(rhos):
        for i in range(per_class):
            clouds.append(generate_orbit(OrbitParams(rho, n_points, derive_seed(seed, c, i))))
            labels.append(c)
    return LabeledCloudSet(clouds, labels, [f"rho={r:g}" for r in rhos])


# --------------------------------------------------------- geometric patterns


def _circles(rng: Xoshiro256, n: int, jitter: float, background: float) -> np.ndarray:
    # two circles of different radii, as in a classic two-loop example
    circles = ((0.3, 0.5, 0.2), (0.72, 0.5, 0.12))
    weights = (0.6, 0.4)
    n_bg = int(round(background * n))
    pts = []
    for k in range(n - n_bg):
        cx, cy, rad = circles[0] if rng.random() < weights[0] else circles[1]
        theta = 2.0 * math.pi * rng.random()
        pts.append((cx + rad * math.cos(theta) + (rng.normal(0.0, jitter) if jitter else 0.0),
                    cy + rad * math.sin(theta) + (rng.normal(0.0, jitter) if jitter else 0.0)))
    for _ in range(n_bg):
        pts.append((rng.random(), rng.random()))
    return np.array(pts, dtype=float).reshape(-1, 2)


def _clusters(rng: Xoshiro256, n: int, n_blobs: int = 3, sigma: float = 0.05) -> np.ndarray:
    centres = [(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)) for _ in range(n_blobs)]
    pts = []
    for _ in range(n):
        cx, cy = centres[rng.randbelow(n_blobs)]
        pts.append((rng.normal(cx, sigma), rng.normal(cy, sigma)))
    return np.array(pts, dtype=float).reshape(-1, 2)


def _uniform(rng: Xoshiro256, n: int) -> np.ndarray:
    return np.array([(rng.random(), rng.random()) for _ in range(n)], dtype=float).reshape(-1, 2)


def generate_pattern(kind: str, n_points: int, seed: int, jitter: float = 0.01, background: float = 0.2) -> PointCloud:
    rng = Xoshiro256(seed)
    if kind == "circles":
        return PointCloud(_circles(rng, n_points, jitter, background))
    if kind == "clusters":
        return PointCloud(_clusters(rng, n_points))
    if kind == "uniform":
        return PointCloud(_uniform(rng, n_points))
    raise ValueError(f"unknown pattern class {kind!r}; choose from {', '.join(PATTERN_CLASSES)}")


def generate_pattern_set(classes: Sequence[str], per_class: int, n_points: int, seed: int,
                         jitter: float = 0.01, background: float = 0.2) -> LabeledCloudSet:
    clouds, labels = [], []
    for c, kind in enumerate(classes):
        for i in range(per_class):
            clouds.append(generate_pattern(kind, n_points, derive_seed(seed, c, i), jitter, background))
            labels.append(c)
    return LabeledCloudSet(clouds, labels, list(classes))


# ------------------------------------------------------------------- IO


def write_cloud_csv(path, cloud) -> None:
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in pts.tolist():
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_cloud_csv(path) -> PointCloud:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split(",")])
    return PointCloud(np.array(rows, dtype=float))


def _index_width(n: int) -> int:
    return max(4, len(str(max(n - 1, 0))))


def write_dataset(root, data: LabeledCloudSet, manifest: dict) -> Path:
    root = Path(root)
    counts: dict[int, int] = {}
    width = _index_width(max((data.labels.count(c) for c in set(data.labels)), default=1))
    for cloud, y in zip(data.clouds, data.labels):
        i = counts.get(y, 0)
        counts[y] = i + 1
        d = root / "clouds" / str(y)
        d.mkdir(parents=True, exist_ok=True)
        write_cloud_csv(d / f"{i:0{width}d}.csv", cloud)
    full = dict(manifest)
    full["kind"] = "clouds"
    full["class_names"] = list(data.class_names)
    full["counts"] = {str(k): counts[k] for k in sorted(counts)}
    full["n_items"] = len(data)
    (root / "manifest.json").write_text(json.dumps(full, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return root


@dataclass(frozen=True)
class DatasetItem:
    label: int
    stem: str
    path: Path


def list_items(root, sub: str = "clouds", suffix: str = ".csv") -> list[DatasetItem]:
    """Items under ``root/sub/<label>/`` sorted by label then file stem."""
    base = Path(root) / sub
    if not base.is_dir():
        raise FileNotFoundError(f"{base} does not exist")
    items = []
    for label_dir in sorted((p for p in base.iterdir() if p.is_dir()), key=lambda p: int(p.name)):
        for f in sorted(label_dir.glob(f"*{suffix}")):
            items.append(DatasetItem(int(label_dir.name), f.stem, f))
    return items


def read_dataset(root) -> LabeledCloudSet:
    items = list_items(root)
    manifest_path = Path(root) / "manifest.json"
    names = []
    if manifest_path.exists():
        names = json.loads(manifest_path.read_text(encoding="utf-8")).get("class_names", [])
    labels = [it.label for it in items]
    if not names:
        names = [str(k) for k in range(max(labels) + 1)] if labels else []
    return LabeledCloudSet([read_cloud_csv(it.path) for it in items], labels, names)
