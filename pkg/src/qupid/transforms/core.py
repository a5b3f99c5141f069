"""Identity, Fourier and wavelet transforms of quantized measures."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..diagrams import QuantizedMeasure
from . import fft as _fft
from .wavelets import FilterPair, dwt2, get_filters

IDENTITY = "id"
FOURIER = "fft"
WAVELET_FAMILIES = ("db", "coif")

_NAME_RE = re.compile(r"^(id|fft|db|coif|haar)(\d*)$")


@dataclass(frozen=True)
class TransformKind:
    family: str
    order: int | None = None

    def __post_init__(self):
        if self.family in (IDENTITY, FOURIER):
            if self.order is not None:
                raise ValueError(f"{self.family} takes no order")
        elif self.family in WAVELET_FAMILIES:
            if self.order not in (1, 2, 3):
                raise ValueError(f"{self.family} order must be 1, 2 or 3, got {self.order}")
        else:
            raise ValueError(f"unknown transform family {self.family!r}")

    @property
    def name(self) -> str:
        return self.family if self.order is None else f"{self.family}{self.order}"

    @property
    def is_wavelet(self) -> bool:
        return self.family in WAVELET_FAMILIES

    @classmethod
    def parse(cls, text: str) -> "TransformKind":
        m = _NAME_RE.match(text.strip().lower())
        if m is None:
            raise ValueError(f"unknown transform {text!r}")
        fam, order = m.group(1), m.group(2)
        if fam == "haar":
            if order:
                raise ValueError(f"unknown transform {text!r}")
            return cls("db", 1)
        if fam in (IDENTITY, FOURIER):
            if order:
                raise ValueError(f"unknown transform {text!r}")
            return cls(fam)
        if not order:
            raise ValueError(f"wavelet {text!r} needs an order, e.g. {fam}2")
        return cls(fam, int(order))

    def __str__(self) -> str:
        return self.name


ALL_KINDS = tuple(
    TransformKind.parse(n) for n in ("fft", "db1", "db2", "db3", "coif1", "coif2", "coif3", "id")
)


def wavelet_filters(kind: TransformKind) -> FilterPair:
    if not kind.is_wavelet:
        raise ValueError(f"{kind.name} is not a wavelet transform")
    return get_filters(kind.family, kind.order)


@dataclass(frozen=True)
class Segment:
    name: str
    shape: tuple[int, int]

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Flat real vector plus the ordered segments that make it up."""

    values: np.ndarray
    layout: tuple[Segment, ...]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size != sum(seg.size for seg in self.layout):
            raise ValueError("values length does not match layout")
        if not np.all(np.isfinite(v)):
            raise ValueError("feature vector has non-finite entries")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "layout", tuple(self.layout))

    def __len__(self) -> int:
        return self.values.size

    def names(self, prefix: str = "") -> list[str]:
        return layout_names(self.layout, prefix)

    def segment(self, name: str) -> np.ndarray:
        start = 0
        for seg in self.layout:
            if seg.name == name:
                return self.values[start:start + seg.size].reshape(seg.shape)
            start += seg.size
        raise KeyError(name)


def layout_names(layout, prefix: str = "") -> list[str]:
    names = []
    for seg in layout:
        r, s = seg.shape
        names.extend(f"{prefix}{seg.name}_{i}_{j}" for i in range(r) for j in range(s))
    return names


def _masses(m) -> np.ndarray:
    if isinstance(m, QuantizedMeasure):
        return m.masses
    return np.asarray(m, dtype=float)


def dft2d(m) -> np.ndarray:
    return _fft.fft2(_masses(m))


def dwt2_single_level(m, f: FilterPair):
    return dwt2(_masses(m), f)


def layout_for(kind: TransformKind, shape: tuple[int, int]) -> tuple[Segment, ...]:
    r, s = shape
    if kind.family == IDENTITY:
        return (Segment("m", (r, s)),)
    if kind.family == FOURIER:
        return (Segment("mag", (r, s)), Segment("phase", (r, s)))
    half = ((r + 1) // 2, (s + 1) // 2)
    return tuple(Segment(name, half) for name in ("cH", "cV", "cD", "cA"))


def transform_batch(masses: np.ndarray, kind: TransformKind) -> np.ndarray:
    """Feature rows for a stack of measures of shape ``(n, r, s)``."""
    masses = np.asarray(masses, dtype=float)
    n = masses.shape[0]
    if kind.family == IDENTITY:
        return masses.reshape(n, -1).copy()
    if kind.family == FOURIER:
        F = _fft.fft2(masses)
        mag = np.abs(F)
        # round-off residue of exact zeros gets the zero-phase convention too
        scale = np.maximum(1.0, np.abs(masses).sum(axis=(1, 2)))[:, None, None]
        phase = np.where(mag > 1e-12 * scale, np.angle(F), 0.0)
        # angle() may return -pi; fold onto (-pi, pi]
        phase = np.where(phase <= -np.pi, np.pi, phase)
        return np.concatenate((mag.reshape(n, -1), phase.reshape(n, -1)), axis=1)
    cA, cH, cV, cD = dwt2(masses, wavelet_filters(kind))
    return np.concatenate([c.reshape(n, -1) for c in (cH, cV, cD, cA)], axis=1)


def _single(m, kind: TransformKind) -> FeatureVector:
    masses = _masses(m)
    values = transform_batch(masses[None], kind)[0]
    return FeatureVector(values, layout_for(kind, masses.shape))


def transform_identity(m) -> FeatureVector:
    return _single(m, TransformKind(IDENTITY))


def transform_fourier(m) -> FeatureVector:
    """Magnitudes then phases (radians in ``(-pi, pi]``, phase of 0 is 0) of the 2-D DFT."""
    return _single(m, TransformKind(FOURIER))


def transform_wavelet(m, kind: TransformKind) -> FeatureVector:
    """Concatenation ``[cH, cV, cD, cA]`` of a single-level wavelet transform."""
    if not kind.is_wavelet:
        raise ValueError(f"{kind.name} is not a wavelet transform")
    return _single(m, kind)


def apply(m, kind) -> FeatureVector:
    if isinstance(kind, str):
        kind = TransformKind.parse(kind)
    if kind.family == IDENTITY:
        return transform_identity(m)
    if kind.family == FOURIER:
        return transform_fourier(m)
    return transform_wavelet(m, kind)
