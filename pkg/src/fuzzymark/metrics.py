"""Quality and payload-recovery metrics."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .core import as_image

_PEAK = 255.0


def psnr(reference, test) -> float:
    """Peak signal-to-noise ratio in dB; identical images give +inf."""
    reference = as_image(reference)
    test = as_image(test)
    if reference.shape != test.shape:
        raise ValueError(f"shape mismatch {reference.shape} vs {test.shape}")
    mse = float(np.mean((reference - test) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(_PEAK**2 / mse)


def _window_means(img, kernel):
    """Separable windowed means over valid positions only."""
    margin = kernel.size // 2
    out = ndimage.correlate1d(img, kernel, axis=0, mode="constant")
    out = ndimage.correlate1d(out, kernel, axis=1, mode="constant")
    return out[margin:-margin, margin:-margin]


def mssim(reference, test, window: int = 11, sigma: float = 1.5) -> float:
    """Mean SSIM with a Gaussian window (K1=0.01, K2=0.03, L=255)."""
    reference = as_image(reference)
    test = as_image(test)
    if reference.shape != test.shape:
        raise ValueError(f"shape mismatch {reference.shape} vs {test.shape}")
    if min(reference.shape) < window:
        raise ValueError(f"image smaller than the {window}x{window} window")
    radius = window // 2
    coords = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(coords**2) / (2.0 * sigma**2))
    kernel /= kernel.sum()

    c1 = (0.01 * _PEAK) ** 2
    c2 = (0.03 * _PEAK) ** 2
    mu_x = _window_means(reference, kernel)
    mu_y = _window_means(test, kernel)
    var_x = _window_means(reference**2, kernel) - mu_x**2
    var_y = _window_means(test**2, kernel) - mu_y**2
    cov = _window_means(reference * test, kernel) - mu_x * mu_y
    ssim_map = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) / (
        (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    )
    return float(ssim_map.mean())


def nc(extracted, reference) -> float:
    """Bit agreement in [0, 1]: 1 - mean absolute difference."""
    extracted = np.asarray(extracted, dtype=np.float64).ravel()
    reference = np.asarray(reference, dtype=np.float64).ravel()
    if extracted.size != reference.size or extracted.size == 0:
        raise ValueError("bit strings must be non-empty and equal length")
    return 1.0 - float(np.abs(extracted - reference).sum()) / extracted.size


def ber(extracted, reference) -> float:
    """Bit error rate as a percentage."""
    return (1.0 - nc(extracted, reference)) * 100.0
