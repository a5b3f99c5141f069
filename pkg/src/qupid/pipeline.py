"""Diagram-set vectorization: one fitted grid per diagram key, transforms concatenated.

A *sample* maps diagram keys to diagrams, e.g. ``{"h0": D0, "h1": D1}`` for a
point cloud or ``{"sub_t0.1_h0": ..., "sup_t10_h1": ...}`` for a graph. Keys
are always concatenated in a fixed order: degree ascending, then sublevel
before superlevel, then diffusion time ascending.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .diagrams import DROP, LOG, SCALINGS, GridSpec, PersistenceDiagram, to_birth_persistence
from .quantize import build_grid, quantize_bp
from .transforms import TransformKind, layout_for, layout_names, transform_batch

Sample = Mapping[str, PersistenceDiagram]

_KEY_RE = re.compile(r"^(?:(sub|sup)_t([^_]+)_)?h(\d+)$")


def key_order(key: str) -> tuple:
    m = _KEY_RE.match(key)
    if m is None:
        return (1 << 30, 0, 0.0, key)
    direction, t, degree = m.groups()
    return (int(degree), 0 if direction in (None, "sub") else 1, float(t) if t else 0.0, key)


def sort_keys(keys) -> list[str]:
    return sorted(set(keys), key=key_order)


def diagram_key(degree: int, direction: str | None = None, t: float | None = None) -> str:
    if direction is None:
        return f"h{degree}"
    return f"{direction}_t{t:g}_h{degree}"


def parse_grid(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if m is None:
        raise ValueError(f"grid must look like 32x32, got {text!r}")
    return int(m.group(1)), int(m.group(2))


@dataclass(frozen=True)
class VectorizerConfig:
    grid: tuple[int, int] = (32, 32)
    scaling: str = LOG
    alpha: tuple[float, float] | None = (500.0, 500.0)
    transforms: tuple[str, ...] = ("coif2",)

    def __post_init__(self):
        if self.scaling not in SCALINGS:
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if self.scaling == LOG and self.alpha is None:
            raise ValueError("log scaling needs alpha")
        for t in self.transforms:
            TransformKind.parse(t)
        if not self.transforms:
            raise ValueError("at least one transform is required")

    @property
    def kinds(self) -> list[TransformKind]:
        return [TransformKind.parse(t) for t in self.transforms]

    def with_alpha(self, alpha) -> "VectorizerConfig":
        return replace(self, alpha=(float(alpha[0]), float(alpha[1])))

    def to_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "scaling": self.scaling,
            "alpha": list(self.alpha) if self.alpha is not None else None,
            "transforms": list(self.transforms),
        }


@dataclass
class Vectorizer:
    config: VectorizerConfig
    grids: dict[str, GridSpec] = field(default_factory=dict)

    @property
    def keys(self) -> list[str]:
        return sort_keys(self.grids)

    def fit(self, samples: Sequence[Sample]) -> "Vectorizer":
        """Fit one grid per diagram key on the (training) samples only."""
        keys = sort_keys(k for s in samples for k in s)
        if not keys:
            raise ValueError("no diagrams to fit")
        r, s = self.config.grid
        self.grids = {}
        for key in keys:
            parts = [to_birth_persistence(smp[key], DROP) for smp in samples if key in smp]
            bp = np.concatenate(parts) if parts else np.zeros((0, 2))
            if bp.shape[0] == 0:
                # a key with no finite points anywhere still gets a valid grid
                bp = np.zeros((1, 2))
            self.grids[key] = build_grid(bp, r, s, self.config.scaling, self.config.alpha)
        return self

    def masses(self, samples: Sequence[Sample]) -> dict[str, np.ndarray]:
        if not self.grids:
            raise RuntimeError("vectorizer is not fitted")
        out = {}
        for key in self.keys:
            grid = self.grids[key]
            r, s = grid.shape
            stack = np.zeros((len(samples), r, s))
            for n, smp in enumerate(samples):
                if key in smp:
                    stack[n], _ = quantize_bp(to_birth_persistence(smp[key], DROP), grid)
            out[key] = stack
        return out

    def transform(self, samples: Sequence[Sample], kinds=None, masses=None) -> np.ndarray:
        kinds = self.config.kinds if kinds is None else [TransformKind.parse(k) if isinstance(k, str) else k for k in kinds]
        masses = self.masses(samples) if masses is None else masses
        blocks = []
        for kind in kinds:
            for key in self.keys:
                blocks.append(transform_batch(masses[key], kind))
        return np.concatenate(blocks, axis=1) if blocks else np.zeros((len(samples), 0))

    def feature_names(self, kinds=None) -> list[str]:
        kinds = self.config.kinds if kinds is None else [TransformKind.parse(k) if isinstance(k, str) else k for k in kinds]
        names = []
        for kind in kinds:
            for key in self.keys:
                names.extend(layout_names(layout_for(kind, self.grids[key].shape), f"{key}_{kind.name}_"))
        return names

    def segments(self, kinds=None) -> list[dict]:
        """Ordered ``{"key", "transform", "segment", "shape", "start", "stop"}`` records."""
        kinds = self.config.kinds if kinds is None else [TransformKind.parse(k) if isinstance(k, str) else k for k in kinds]
        out, start = [], 0
        for kind in kinds:
            for key in self.keys:
                for seg in layout_for(kind, self.grids[key].shape):
                    out.append({
                        "key": key,
                        "transform": kind.name,
                        "segment": seg.name,
                        "shape": list(seg.shape),
                        "start": start,
                        "stop": start + seg.size,
                    })
                    start += seg.size
        return out

    def fit_transform(self, samples: Sequence[Sample]) -> np.ndarray:
        return self.fit(samples).transform(samples)
