"""Independent reference values computed without the package's own code paths."""
from __future__ import annotations

import mpmath as mp


def fourier_of_indicator(a: float, b: float, xi: float, sign: float = 1.0) -> complex:
    """``integral_a^b e^{-2 pi i xi t} dt`` by mpmath quadrature."""
    re = mp.quad(lambda t: mp.cos(2 * mp.pi * xi * t), [a, b])
    im = mp.quad(lambda t: -mp.sin(2 * mp.pi * xi * t), [a, b])
    return sign * complex(re + 1j * im)


def haar_hat(xi: float) -> complex:
    return fourier_of_indicator(0.0, 1.0, xi)


def haar_wavelet_hat(xi: float) -> complex:
    return fourier_of_indicator(0.0, 0.5, xi) - fourier_of_indicator(0.5, 1.0, xi)


def interval_overlap(a: float, b: float, c: float, d: float) -> float:
    return max(0.0, min(b, d) - max(a, c))
