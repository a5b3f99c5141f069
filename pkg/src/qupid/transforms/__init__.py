from .core import (
    ALL_KINDS,
    FeatureVector,
    Segment,
    TransformKind,
    apply,
    dft2d,
    dwt2_single_level,
    layout_for,
    layout_names,
    transform_batch,
    transform_fourier,
    transform_identity,
    transform_wavelet,
    wavelet_filters,
)
from .wavelets import FilterPair, filter_violations, idwt2

__all__ = [
    "ALL_KINDS",
    "FeatureVector",
    "FilterPair",
    "Segment",
    "TransformKind",
    "apply",
    "dft2d",
    "dwt2_single_level",
    "filter_violations",
    "idwt2",
    "layout_for",
    "layout_names",
    "transform_batch",
    "transform_fourier",
    "transform_identity",
    "transform_wavelet",
    "wavelet_filters",
]
