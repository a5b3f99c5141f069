import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import direct_dft2, haar_inner_products

from qupid.diagrams import QuantizedMeasure
from qupid.transforms import (
    TransformKind,
    apply,
    dft2d,
    dwt2_single_level,
    filter_violations,
    idwt2,
    layout_for,
    transform_batch,
    transform_fourier,
    transform_identity,
    transform_wavelet,
    wavelet_filters,
)
from qupid.transforms.fft import dft_direct, fft, fft_bluestein, fft_radix2
from qupid.transforms.wavelets import FILTERS, reconstructable_extent

WAVELETS = [TransformKind.parse(n) for n in ("db1", "db2", "db3", "coif1", "coif2", "coif3")]


# ------------------------------------------------------------------ parsing


def test_kind_parsing():
    assert TransformKind.parse("haar") == TransformKind("db", 1)
    assert TransformKind.parse("COIF2").name == "coif2"
    for bad in ("db4", "coif0", "fft2", "sym2", "db", "haar1"):
        with pytest.raises(ValueError):
            TransformKind.parse(bad)


# ------------------------------------------------------------------ identity


def test_identity_examples():
    assert transform_identity(np.array([[1, 0], [0, 2]])).values.tolist() == [1, 0, 0, 2]
    assert transform_identity(np.zeros((3, 3))).values.tolist() == [0] * 9
    assert transform_identity(np.array([[5.0]])).values.tolist() == [5]


# ------------------------------------------------------------------ Fourier


def test_fft_matches_direct_dft_1d():
    rng = np.random.default_rng(0)
    for n in range(1, 70):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        ref = dft_direct(x)
        np.testing.assert_allclose(fft(x), ref, atol=1e-9 * max(1, np.abs(ref).max()))
        np.testing.assert_allclose(fft_bluestein(x), ref, atol=1e-9 * max(1, np.abs(ref).max()))
        if n & (n - 1) == 0:
            np.testing.assert_allclose(fft_radix2(x), ref, atol=1e-9 * max(1, np.abs(ref).max()))


def test_radix2_rejects_other_lengths():
    with pytest.raises(ValueError):
        fft_radix2(np.ones(6))


def test_dft_examples():
    for r, s in ((1, 1), (3, 4), (8, 8)):
        m = np.zeros((r, s))
        m[0, 0] = 1
        np.testing.assert_allclose(dft2d(m), np.ones((r, s)), atol=1e-15)
        assert np.all(dft2d(np.zeros((r, s))) == 0)
    np.testing.assert_allclose(dft2d(np.array([[1.0], [1.0]])), [[2], [0]], atol=1e-15)


def test_fourier_feature_examples():
    m = np.zeros((2, 2))
    m[0, 0] = 1
    assert transform_fourier(m).values.tolist() == [1, 1, 1, 1, 0, 0, 0, 0]
    assert transform_fourier(np.zeros((2, 2))).values.tolist() == [0] * 8
    np.testing.assert_allclose(transform_fourier(np.array([[1.0], [1.0]])).values, [2, 0, 0, 0], atol=1e-15)


def test_phase_range_and_minus_pi():
    # a real DFT coefficient of -1 has phase pi, never -pi
    m = np.array([[0.0], [1.0]])
    v = transform_fourier(m).values
    assert v[3] == pytest.approx(math.pi)
    rng = np.random.default_rng(1)
    for _ in range(20):
        v = transform_fourier(rng.integers(0, 5, size=(5, 6)).astype(float)).values
        ph = v[30:]
        assert np.all(ph > -math.pi) and np.all(ph <= math.pi)


@pytest.mark.parametrize("shape", [(8, 8), (12, 12), (16, 16), (5, 7), (1, 9)])
def test_fft2_matches_literal_double_sum(shape):
    rng = np.random.default_rng(sum(shape))
    m = rng.integers(0, 9, size=shape).astype(float)
    F = dft2d(m)
    ref = direct_dft2(m)
    assert np.abs(F - ref).max() <= 1e-9 * max(1.0, np.abs(ref).max())


@given(st.integers(1, 20), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_parseval(r, s, seed):
    m = np.random.default_rng(seed).integers(0, 10, size=(r, s)).astype(float)
    F = dft2d(m)
    lhs = float(np.sum(np.abs(F) ** 2))
    rhs = r * s * float(np.sum(m * m))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_dft_linearity():
    rng = np.random.default_rng(2)
    a, b = rng.random((6, 10)), rng.random((6, 10))
    np.testing.assert_allclose(dft2d(2.5 * a - 1.5 * b), 2.5 * dft2d(a) - 1.5 * dft2d(b), rtol=1e-9, atol=1e-12)


# ------------------------------------------------------------------ wavelets


def test_haar_filters():
    f = wavelet_filters(TransformKind("db", 1))
    np.testing.assert_allclose(f.lowpass, [0.70710678, 0.70710678], atol=1e-8)
    np.testing.assert_allclose(f.highpass, [1 / math.sqrt(2), -1 / math.sqrt(2)], atol=1e-15)


@pytest.mark.parametrize("kind", WAVELETS, ids=lambda k: k.name)
def test_filter_invariants(kind):
    f = wavelet_filters(kind)
    h, g = f.lowpass, f.highpass
    L = h.size
    assert filter_violations(f) == []
    assert abs(h.sum() - math.sqrt(2)) <= 1e-9
    assert abs(np.dot(h, h) - 1) <= 1e-9
    for m in range(1, L // 2):
        assert abs(np.dot(h[:-2 * m], h[2 * m:])) <= 1e-9
    np.testing.assert_array_equal(g, [(-1) ** k * h[L - 1 - k] for k in range(L)])
    expected_len = 2 * kind.order if kind.family == "db" else 6 * kind.order
    assert L == expected_len


@pytest.mark.parametrize("kind", [k for k in WAVELETS if k.family == "db"], ids=lambda k: k.name)
def test_daubechies_vanishing_moments(kind):
    g = wavelet_filters(kind).highpass
    k = np.arange(g.size, dtype=float)
    for deg in range(kind.order):
        assert abs(np.dot(g, k ** deg)) <= 1e-6


def test_db2_first_moment():
    g = wavelet_filters(TransformKind("db", 2)).highpass
    assert abs(np.dot(g, np.arange(4))) <= 1e-9


def test_haar_dwt_examples():
    f = wavelet_filters(TransformKind("db", 1))
    cA, cH, cV, cD = dwt2_single_level(np.ones((2, 2)), f)
    assert cA.shape == (1, 1) and cA[0, 0] == pytest.approx(2.0)
    assert np.allclose([cH, cV, cD], 0, atol=1e-15)
    cA, cH, cV, cD = dwt2_single_level(np.array([[1.0, 0], [0, 0]]), f)
    for c in (cA, cH, cV, cD):
        assert c[0, 0] == pytest.approx(0.5, abs=1e-15)
    for c in dwt2_single_level(np.zeros((4, 4)), f):
        assert np.all(c == 0)


def test_wavelet_vector_examples():
    assert transform_wavelet(np.ones((2, 2)), TransformKind("db", 1)).values.tolist() == pytest.approx([0, 0, 0, 2])
    for kind in WAVELETS:
        v = transform_wavelet(np.zeros((4, 4)), kind)
        assert len(v) == 16 and np.all(v.values == 0)
    rng = np.random.default_rng(0)
    assert len(transform_wavelet(rng.random((2, 2)), TransformKind("db", 1))) == 4


def test_concatenation_order_and_layout():
    rng = np.random.default_rng(5)
    m = rng.random((6, 5))
    kind = TransformKind("coif", 1)
    cA, cH, cV, cD = dwt2_single_level(m, wavelet_filters(kind))
    v = transform_wavelet(m, kind)
    assert [seg.name for seg in v.layout] == ["cH", "cV", "cD", "cA"]
    np.testing.assert_array_equal(v.values, np.concatenate([c.ravel() for c in (cH, cV, cD, cA)]))
    assert cA.shape == (3, 3)
    np.testing.assert_array_equal(v.segment("cV"), cV)
    assert v.names()[0] == "cH_0_0"


@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_haar_matches_inner_products(r, s, seed):
    m = np.random.default_rng(seed).random((r, s))
    got = dwt2_single_level(m, wavelet_filters(TransformKind("db", 1)))
    ref = haar_inner_products(m)
    for a, b in zip(got, ref):
        np.testing.assert_allclose(a, b, atol=1e-12, rtol=0)


@pytest.mark.parametrize("kind", WAVELETS, ids=lambda k: k.name)
def test_energy_preserved_away_from_boundary(kind):
    f = wavelet_filters(kind)
    L = f.length
    n = 4 * L + 8
    rng = np.random.default_rng(L)
    m = np.zeros((n, n))
    m[L:n - L, L:n - L] = rng.random((n - 2 * L, n - 2 * L))
    coeffs = dwt2_single_level(m, f)
    energy = sum(float(np.sum(c * c)) for c in coeffs)
    assert energy == pytest.approx(float(np.sum(m * m)), rel=1e-8)


@pytest.mark.parametrize("kind", WAVELETS, ids=lambda k: k.name)
@pytest.mark.parametrize("shape", [(24, 24), (40, 37), (64, 64)])
def test_perfect_reconstruction_of_interior(kind, shape):
    f = wavelet_filters(kind)
    rng = np.random.default_rng(shape[0] * shape[1])
    m = rng.random(shape)
    back = idwt2(*dwt2_single_level(m, f), f, shape)
    er, es = reconstructable_extent(shape[0], f), reconstructable_extent(shape[1], f)
    assert er > 0 and es > 0
    np.testing.assert_allclose(back[:er, :es], m[:er, :es], atol=1e-9)


@pytest.mark.parametrize("kind", WAVELETS, ids=lambda k: k.name)
def test_wavelet_linearity(kind):
    f = wavelet_filters(kind)
    rng = np.random.default_rng(9)
    a, b = rng.random((10, 7)), rng.random((10, 7))
    for x, y, z in zip(dwt2_single_level(3 * a + 2 * b, f), dwt2_single_level(a, f), dwt2_single_level(b, f)):
        np.testing.assert_allclose(x, 3 * y + 2 * z, rtol=1e-9, atol=1e-12)


def test_embedded_tables_accepted_at_import():
    assert len(FILTERS) == 6


# ------------------------------------------------------------------ dispatch and batches


def test_apply_dispatch():
    rng = np.random.default_rng(4)
    m = QuantizedMeasure(rng.integers(0, 3, size=(4, 6)))
    assert apply(m, "id").values.tolist() == transform_identity(m).values.tolist()
    assert apply(m, TransformKind("fft")).values.tolist() == transform_fourier(m).values.tolist()
    assert apply(m, "coif2").values.tolist() == transform_wavelet(m, TransformKind("coif", 2)).values.tolist()


@pytest.mark.parametrize("name", ["id", "fft", "db1", "db3", "coif2", "coif3"])
def test_batch_matches_single(name):
    kind = TransformKind.parse(name)
    rng = np.random.default_rng(8)
    stack = rng.integers(0, 4, size=(5, 7, 6)).astype(float)
    batch = transform_batch(stack, kind)
    for k in range(5):
        np.testing.assert_allclose(batch[k], apply(stack[k], kind).values, atol=1e-12)
    assert batch.shape[1] == sum(seg.size for seg in layout_for(kind, (7, 6)))


def test_fourier_length():
    assert len(transform_fourier(np.ones((3, 5)))) == 2 * 3 * 5
