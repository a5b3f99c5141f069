"""Persistence diagrams, quantization grids and quantized measures.

Diagrams are stored as ``(n, 2)`` float arrays of ``(birth, death)`` rows, a
multiset-as-list: duplicate rows encode multiplicity. Birth-persistence
diagrams use the same layout with rows ``(b, p)`` where ``p = death - birth``.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

UNIFORM = "uniform"
LOG = "log"
SCALINGS = (UNIFORM, LOG)

DROP = "drop"


class DiagramPoint(NamedTuple):
    birth: float
    death: float


class BPPoint(NamedTuple):
    b: float
    p: float


@dataclass(frozen=True)
class ClampTo:
    """Replace infinite deaths by ``value``."""

    value: float


InfinitePolicy = Union[str, ClampTo]


def _as_pairs(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=float)
    arr = arr.reshape(-1, 2)
    return arr


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """A finite multiset of ``(birth, death)`` pairs in a single homology degree.

    ``death`` may be ``+inf`` for essential classes. The array is copied and
    made read-only on construction.
    """

    points: np.ndarray
    degree: int = 0

    def __post_init__(self):
        pts = _as_pairs(self.points).copy()
        if self.degree < 0:
            raise ValueError("homology degree must be non-negative")
        if pts.size:
            if not np.all(np.isfinite(pts[:, 0])):
                raise ValueError("births must be finite")
            if np.any(np.isnan(pts[:, 1])) or np.any(pts[:, 1] == -np.inf):
                raise ValueError("deaths must be real or +inf")
            if np.any(pts[:, 0] > pts[:, 1]):
                raise ValueError("birth must not exceed death")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        for b, d in self.points:
            yield DiagramPoint(float(b), float(d))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self.degree == other.degree and self.sorted_points().tolist() == other.sorted_points().tolist()

    def sorted_points(self) -> np.ndarray:
        if len(self) == 0:
            return self.points
        order = np.lexsort((self.points[:, 1], self.points[:, 0]))
        return self.points[order]

    @property
    def n_essential(self) -> int:
        return int(np.sum(np.isinf(self.points[:, 1]))) if len(self) else 0

    def finite(self) -> "PersistenceDiagram":
        keep = np.isfinite(self.points[:, 1]) if len(self) else slice(None)
        return PersistenceDiagram(self.points[keep], self.degree)


def to_birth_persistence(d: PersistenceDiagram, infinite_policy: InfinitePolicy = DROP) -> np.ndarray:
    """Map ``(b, d) -> (b, d - b)``.

    Essential classes are dropped or clamped to ``ClampTo.value``; clamping
    below a birth raises ``ValueError("clamp below birth")``.
    """
    pts = np.array(d.points, dtype=float)
    if pts.shape[0] == 0:
        return np.zeros((0, 2), dtype=float)
    inf = np.isinf(pts[:, 1])
    if isinstance(infinite_policy, ClampTo):
        v = float(infinite_policy.value)
        if np.any(inf) and np.any(pts[inf, 0] > v):
            raise ValueError("clamp below birth")
        pts[inf, 1] = v
    elif infinite_policy == DROP:
        pts = pts[~inf]
    else:
        raise ValueError(f"unknown infinite policy {infinite_policy!r}")
    out = np.empty_like(pts)
    out[:, 0] = pts[:, 0]
    out[:, 1] = pts[:, 1] - pts[:, 0]
    return out


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Edges ``b_1 < ... < b_r`` and ``p_1 < ... < p_s`` of a quantization grid.

    The last bin on each axis extends to ``+inf``. ``alpha`` is only used
    (and required) for log-scaled grids.
    """

    b_edges: np.ndarray
    p_edges: np.ndarray
    scaling: str = UNIFORM
    alpha: tuple[float, float] | None = None

    def __post_init__(self):
        b = np.asarray(self.b_edges, dtype=float).ravel().copy()
        p = np.asarray(self.p_edges, dtype=float).ravel().copy()
        for name, e in (("b_edges", b), ("p_edges", p)):
            if e.size < 1:
                raise ValueError(f"{name} must contain at least one edge")
            if not np.all(np.isfinite(e)):
                raise ValueError(f"{name} must be finite")
            if np.any(np.diff(e) <= 0):
                raise ValueError(f"{name} must be strictly increasing")
        if self.scaling not in SCALINGS:
            raise ValueError(f"unknown scaling {self.scaling!r}")
        alpha = self.alpha
        if self.scaling == LOG:
            if alpha is None or len(alpha) != 2 or min(alpha) <= 0:
                raise ValueError("log-scaled grids need alpha with two positive entries")
            alpha = (float(alpha[0]), float(alpha[1]))
        elif alpha is not None:
            alpha = (float(alpha[0]), float(alpha[1]))
        b.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "b_edges", b)
        object.__setattr__(self, "p_edges", p)
        object.__setattr__(self, "alpha", alpha)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.b_edges.size, self.p_edges.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridSpec):
            return NotImplemented
        return (
            self.scaling == other.scaling
            and self.alpha == other.alpha
            and self.b_edges.tolist() == other.b_edges.tolist()
            and self.p_edges.tolist() == other.p_edges.tolist()
        )

    def to_dict(self) -> dict:
        return {
            "b_edges": self.b_edges.tolist(),
            "p_edges": self.p_edges.tolist(),
            "scaling": self.scaling,
            "alpha": list(self.alpha) if self.alpha is not None else None,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GridSpec":
        alpha = obj.get("alpha")
        return cls(obj["b_edges"], obj["p_edges"], obj.get("scaling", UNIFORM), tuple(alpha) if alpha else None)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GridSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class QuantizedMeasure:
    """Bin masses ``m[i, j]`` on the grid ``{0..r-1} x {0..s-1}``."""

    masses: np.ndarray
    grid: GridSpec | None = field(default=None)

    def __post_init__(self):
        m = np.array(self.masses, dtype=float)
        if m.ndim != 2:
            raise ValueError("masses must be a 2-D matrix")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ValueError("masses must be finite and non-negative")
        if self.grid is not None and m.shape != self.grid.shape:
            raise ValueError(f"masses shape {m.shape} does not match grid {self.grid.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.masses.shape

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())


# ---------------------------------------------------------------- CSV IO

_DEGREE_RE = re.compile(r"_h(\d+)\.csv$")


def degree_from_filename(path) -> int:
    m = _DEGREE_RE.search(Path(path).name)
    if m is None:
        raise ValueError(f"cannot read homology degree from {Path(path).name!r}; expected suffix _h<k>.csv")
    return int(m.group(1))


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def write_diagram_csv(path, diagram: PersistenceDiagram) -> None:
    """Write ``birth,death`` rows; ``inf`` marks essential classes."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("birth,death\n")
        for b, d in diagram.points:
            fh.write(f"{_fmt(b)},{_fmt(d)}\n")


def read_diagram_csv(path, degree: int | None = None) -> PersistenceDiagram:
    if degree is None:
        degree = degree_from_filename(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["birth", "death"]:
            raise ValueError(f"{path}: expected header 'birth,death'")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    return PersistenceDiagram(np.array(rows, dtype=float).reshape(-1, 2), degree)


def concat_bp(diagrams: Iterable[PersistenceDiagram], infinite_policy: InfinitePolicy = DROP) -> np.ndarray:
    parts = [to_birth_persistence(d, infinite_policy) for d in diagrams]
    if not parts:
        return np.zeros((0, 2))
    return np.concatenate(parts, axis=0)


def diagram_from_pairs(pairs: Sequence[tuple[float, float]], degree: int) -> PersistenceDiagram:
    return PersistenceDiagram(np.array(pairs, dtype=float).reshape(-1, 2), degree)
