"""Fourier collocation helpers on uniform periodic grids.

Matrices follow the standard trigonometric-interpolation formulas for even n
(Trefethen's construction); values-based derivatives go through the FFT with
the Nyquist mode zeroed for odd derivative orders.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def _check_n(n: int):
    if n < 4 or n % 2 != 0:
        raise DomainError(f"collocation grid size must be even and >= 4, got {n}")


def diff_values(values: np.ndarray, period: float, order: int = 1) -> np.ndarray:
    """Spectral derivative of sampled periodic values."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    _check_n(n)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / period
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[n // 2] = 0.0
    return np.real(np.fft.ifft(mult * np.fft.fft(values)))


def diff_matrix(n: int, period: float) -> np.ndarray:
    """First-derivative collocation matrix (antisymmetric for even n)."""
    _check_n(n)
    h = 2.0 * np.pi / n
    j = np.arange(1, n)
    col = np.zeros(n)
    col[1:] = 0.5 * (-1.0) ** j / np.tan(0.5 * j * h)
    row = np.zeros(n)
    row[1:] = col[1:][::-1]
    from scipy.linalg import toeplitz

    return toeplitz(col, -col) * (2.0 * np.pi / period)


def diff2_matrix(n: int, period: float) -> np.ndarray:
    """Second-derivative collocation matrix (symmetric)."""
    _check_n(n)
    h = 2.0 * np.pi / n
    j = np.arange(1, n)
    col = np.empty(n)
    col[0] = -np.pi**2 / (3.0 * h**2) - 1.0 / 6.0
    col[1:] = -((-1.0) ** j) / (2.0 * np.sin(0.5 * j * h) ** 2)
    from scipy.linalg import toeplitz

    return toeplitz(col) * (2.0 * np.pi / period) ** 2


def operator_matrix_from_symbol(symbol: np.ndarray, n: int) -> np.ndarray:
    """Real collocation matrix of a Fourier multiplier with given symbol.

    symbol[k] multiplies the k-th FFT mode (numpy fftfreq ordering); the
    symbol must satisfy the reality condition symbol[-k] = conj(symbol[k]).
    """
    _check_n(n)
    eye = np.eye(n)
    return np.real(np.fft.ifft(symbol[:, None] * np.fft.fft(eye, axis=0), axis=0))
