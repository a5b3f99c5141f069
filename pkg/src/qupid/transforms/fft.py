"""Discrete Fourier transforms: iterative radix-2, Bluestein chirp-z, and direct evaluation.

All routines transform along the last axis and broadcast over leading axes.
Sign convention ``F[l] = sum_k x[k] exp(-2 pi i l k / n)``, no normalization.
"""

from __future__ import annotations

import numpy as np


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft_radix2(x) -> np.ndarray:
    """Decimation-in-time Cooley-Tukey FFT; the last axis must be a power of two."""
    a = np.asarray(x, dtype=complex)
    n = a.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"radix-2 FFT needs a power-of-two length, got {n}")
    if n == 1:
        return a.copy()
    lead = a.shape[:-1]
    a = a[..., _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = a.reshape(*lead, n // size, size)
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        a = np.concatenate((even + odd, even - odd), axis=-1).reshape(*lead, n)
        size *= 2
    return a


def _ifft_radix2(x) -> np.ndarray:
    n = x.shape[-1]
    return np.conj(fft_radix2(np.conj(x))) / n


def fft_bluestein(x) -> np.ndarray:
    """Arbitrary-length DFT as a circular convolution of power-of-two size."""
    a = np.asarray(x, dtype=complex)
    n = a.shape[-1]
    if n == 1:
        return a.copy()
    k = np.arange(n)
    # k^2 mod 2n keeps the chirp argument small for large n
    chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    m = 1 << (2 * n - 1).bit_length()
    u = np.zeros(a.shape[:-1] + (m,), dtype=complex)
    u[..., :n] = a * chirp
    v = np.zeros(m, dtype=complex)
    v[:n] = np.conj(chirp)
    v[m - n + 1:] = np.conj(chirp[1:])[::-1]
    conv = _ifft_radix2(fft_radix2(u) * fft_radix2(v))
    return conv[..., :n] * chirp


def dft_direct(x) -> np.ndarray:
    """O(n^2) evaluation of the defining sum."""
    a = np.asarray(x, dtype=complex)
    n = a.shape[-1]
    k = np.arange(n)
    w = np.exp(-2j * np.pi * (np.outer(k, k) % n) / n)
    return a @ w.T


def fft(x) -> np.ndarray:
    n = np.shape(x)[-1]
    if is_power_of_two(n):
        return fft_radix2(x)
    return fft_bluestein(x)


def fft2(m) -> np.ndarray:
    """2-D DFT ``F[l1, l2] = sum m[i, j] exp(-2 pi i (l1 i / r + l2 j / s))``."""
    a = np.asarray(m, dtype=complex)
    a = fft(a)
    return np.swapaxes(fft(np.swapaxes(a, -1, -2)), -1, -2)


def dft2_direct(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    a = dft_direct(a)
    return np.swapaxes(dft_direct(np.swapaxes(a, -1, -2)), -1, -2)
