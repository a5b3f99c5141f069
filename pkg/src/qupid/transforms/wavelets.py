"""Orthonormal wavelet filter tables and the single-level 2-D filter bank.

Scaling filters are the standard Daubechies (``db1``-``db3``, 2p taps) and
Coiflet (``coif1``-``coif3``, 6p taps) tables. The wavelet filter is the
quadrature mirror ``g[k] = (-1)**k * h[L-1-k]``.

Analysis uses zero extension. Coefficient ``l`` of an axis of length ``N``
is the inner product with the translate ``l - (L/2 - 1)``::

    c[l] = sum_k f[k] * x[2*(l - L/2 + 1) + k],   l = 0 .. ceil(N/2) - 1

so the low-index border (where the dense low-persistence bins sit) is fully
covered. For the Haar pair this reduces to ``(x[2l] +/- x[2l+1]) / sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SCALING_FILTERS = {
    ("db", 1): (0.7071067811865476, 0.7071067811865476),
    ("db", 2): (
        0.48296291314453416, 0.8365163037378079, 0.2241438680420134, -0.12940952255126037,
    ),
    ("db", 3): (
        0.33267055295008263, 0.8068915093110925, 0.45987750211849154,
        -0.13501102001025458, -0.08544127388202666, 0.03522629188570953,
    ),
    ("coif", 1): (
        -0.07273261951252645, 0.3378976624574818, 0.8525720202116004,
        0.3848648468648578, -0.07273261951252645, -0.015655728135791993,
    ),
    ("coif", 2): (
        0.01638733646320364, -0.04146493678687178, -0.0673725547237256,
        0.3861100668227629, 0.8127236354494135, 0.4170051844232391,
        -0.07648859907828076, -0.05943441864643109, 0.02368017194684777,
        0.005611434819368834, -0.0018232088709110323, -0.000720549445520347,
    ),
    ("coif", 3): (
        -0.003793512864380802, 0.007782596425672746, 0.023452696142077168,
        -0.06577191128146936, -0.06112339000297255, 0.40517690240911824,
        0.7937772226260872, 0.42848347637737, -0.07179982161915484,
        -0.08230192710629983, 0.03455502757329774, 0.015880544863669452,
        -0.009007976136730624, -0.0025745176881367972, 0.0011175187708306303,
        0.0004662169598204029, -7.0983302506379e-05, -3.459977319727278e-05,
    ),
}

FILTER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FilterPair:
    lowpass: np.ndarray
    highpass: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.lowpass, dtype=float).copy()
        g = np.asarray(self.highpass, dtype=float).copy()
        if h.shape != g.shape or h.ndim != 1 or h.size % 2:
            raise ValueError("filters must be 1-D, of equal even length")
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "lowpass", h)
        object.__setattr__(self, "highpass", g)

    @property
    def length(self) -> int:
        return self.lowpass.size

    @classmethod
    def from_scaling(cls, h) -> "FilterPair":
        h = np.asarray(h, dtype=float)
        L = h.size
        g = np.array([(-1) ** k * h[L - 1 - k] for k in range(L)])
        return cls(h, g)


def filter_violations(f: FilterPair, tol: float = FILTER_TOL) -> list[str]:
    """Names of the orthonormality conditions ``f`` fails (empty if none)."""
    h, g = f.lowpass, f.highpass
    L = h.size
    bad = []
    if abs(h.sum() - math.sqrt(2.0)) > tol:
        bad.append("sum(h) != sqrt(2)")
    if abs(np.dot(h, h) - 1.0) > tol:
        bad.append("sum(h^2) != 1")
    for m in range(1, L // 2):
        if abs(np.dot(h[: L - 2 * m], h[2 * m:])) > tol:
            bad.append(f"shift {m} not orthogonal")
    expected = np.array([(-1) ** k * h[L - 1 - k] for k in range(L)])
    if np.max(np.abs(g - expected)) > tol:
        bad.append("highpass is not the quadrature mirror of lowpass")
    return bad


def _load_tables() -> dict:
    out = {}
    for key, h in _SCALING_FILTERS.items():
        f = FilterPair.from_scaling(h)
        bad = filter_violations(f)
        if bad:
            raise RuntimeError(f"embedded filter {key} rejected: {', '.join(bad)}")
        out[key] = f
    return out


FILTERS = _load_tables()


def get_filters(family: str, order: int) -> FilterPair:
    try:
        return FILTERS[(family, order)]
    except KeyError:
        raise ValueError(f"unsupported wavelet {family}{order}; orders 1-3 of db and coif are available") from None


def analysis_1d(x: np.ndarray, f: FilterPair, axis: int = -1) -> tuple[np.ndarray, np.ndarray]:
    """Single-level lowpass/highpass coefficients along ``axis``."""
    x = np.moveaxis(np.asarray(x, dtype=float), axis, -1)
    n = x.shape[-1]
    L = f.length
    half = (n + 1) // 2
    front = L - 2
    ext = np.zeros(x.shape[:-1] + (front + 2 * half,), dtype=float)
    ext[..., front:front + n] = x
    lo = np.zeros(x.shape[:-1] + (half,))
    hi = np.zeros_like(lo)
    for k in range(L):
        seg = ext[..., k:k + 2 * half:2]
        lo += f.lowpass[k] * seg
        hi += f.highpass[k] * seg
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def synthesis_1d(lo: np.ndarray, hi: np.ndarray, f: FilterPair, n: int, axis: int = -1) -> np.ndarray:
    """Adjoint of :func:`analysis_1d`; exact on indices ``0 .. 2*ceil(n/2) - L``."""
    lo = np.moveaxis(np.asarray(lo, dtype=float), axis, -1)
    hi = np.moveaxis(np.asarray(hi, dtype=float), axis, -1)
    L = f.length
    half = lo.shape[-1]
    front = L - 2
    ext = np.zeros(lo.shape[:-1] + (front + 2 * half,))
    for k in range(L):
        ext[..., k:k + 2 * half:2] += f.lowpass[k] * lo + f.highpass[k] * hi
    return np.moveaxis(ext[..., front:front + n], -1, axis)


def reconstructable_extent(n: int, f: FilterPair) -> int:
    """Number of leading indices recovered exactly by :func:`synthesis_1d`."""
    return max(0, 2 * ((n + 1) // 2) - f.length + 1)


def dwt2(m, f: FilterPair) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Single-level separable transform returning ``(cA, cH, cV, cD)``.

    Axis 0 is the birth index, axis 1 the persistence index. ``cH`` is
    highpass along axis 0, ``cV`` highpass along axis 1. Odd sizes are padded
    with a trailing zero row/column; each output is ``ceil(r/2) x ceil(s/2)``.
    Leading axes beyond the last two are treated as a batch.
    """
    m = np.asarray(m, dtype=float)
    lo1, hi1 = analysis_1d(m, f, axis=-1)
    cA, cH = analysis_1d(lo1, f, axis=-2)
    cV, cD = analysis_1d(hi1, f, axis=-2)
    return cA, cH, cV, cD


def idwt2(cA, cH, cV, cD, f: FilterPair, shape: tuple[int, int]) -> np.ndarray:
    r, s = shape
    lo1 = synthesis_1d(cA, cH, f, r, axis=-2)
    hi1 = synthesis_1d(cV, cD, f, r, axis=-2)
    return synthesis_1d(lo1, hi1, f, s, axis=-1)
