"""Perceptual feature maps driving the adaptive embedding strength.

All three maps are 64x64 (one cell per 8x8 pixel block of a 512x512 cover)
with values in [0, 1]:

  intensity_map      block-mean luminance / 255
  edge_concentration block-mean local variance of a Canny edge map
  saliency_map       spectral-residual saliency, computed at cell resolution
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = _SOBEL_X.T


def _block_mean(img: np.ndarray, size: int = 8) -> np.ndarray:
    h, w = img.shape
    if h % size or w % size:
        raise ValueError(f"image shape {img.shape} not divisible by {size}")
    return img.reshape(h // size, size, w // size, size).mean(axis=(1, 3))


def canny(img: np.ndarray, sigma: float = 1.4, low: float = 0.1, high: float = 0.2) -> np.ndarray:
    """Binary edge map: blur, Sobel, non-maximum suppression, hysteresis.

    low/high are fractions of the maximum gradient magnitude; both edge
    tracking and the thresholds use the suppressed magnitudes.
    """
    if not 0.0 < low < high <= 1.0:
        raise ValueError(f"need 0 < low < high <= 1, got low={low} high={high}")
    img = np.asarray(img, dtype=np.float64)
    smooth = ndimage.gaussian_filter(img, sigma, mode="nearest")
    gx = ndimage.correlate(smooth, _SOBEL_X, mode="nearest")
    gy = ndimage.correlate(smooth, _SOBEL_Y, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    # guard against pure float residue on (near-)constant images
    if peak <= 1e-12 * (1.0 + np.abs(img).max()):
        return np.zeros_like(mag)

    # Quantize gradient direction to 4 sectors and compare against the two
    # neighbours along it. Ties keep exactly one pixel (>= back, > forward).
    angle = np.mod(np.arctan2(gy, gx), np.pi)
    sector = np.floor((angle + np.pi / 8) / (np.pi / 4)).astype(int) % 4
    padded = np.pad(mag, 1, mode="constant")
    shifts = {
        0: ((0, -1), (0, 1)),    # horizontal gradient: left/right
        1: ((-1, -1), (1, 1)),   # diagonal
        2: ((-1, 0), (1, 0)),    # vertical gradient: up/down
        3: ((-1, 1), (1, -1)),   # anti-diagonal
    }
    back = np.zeros_like(mag)
    fwd = np.zeros_like(mag)
    h, w = mag.shape
    for s, ((bdy, bdx), (fdy, fdx)) in shifts.items():
        mask = sector == s
        back[mask] = padded[1 + bdy : 1 + bdy + h, 1 + bdx : 1 + bdx + w][mask]
        fwd[mask] = padded[1 + fdy : 1 + fdy + h, 1 + fdx : 1 + fdx + w][mask]
    thin = np.where((mag >= back) & (mag > fwd), mag, 0.0)

    strong = thin >= high * peak
    weak = thin >= low * peak
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        return np.zeros_like(mag)
    keep = np.zeros(count + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels].astype(np.float64)


def edge_concentration(img: np.ndarray, sigma: float = 1.4, low: float = 0.1, high: float = 0.2) -> np.ndarray:
    """64x64 map of Canny edge density variation, max-normalized.

    Per pixel: population variance of the 3x3 neighbourhood (zero padded) of
    the binary edge map; per cell: mean over the 8x8 block. An image with no
    detected edges yields all zeros.
    """
    edges = canny(img, sigma=sigma, low=low, high=high)
    window_mean = ndimage.correlate(edges, np.ones((3, 3)), mode="constant", cval=0.0) / 9.0
    variance = window_mean - window_mean**2  # binary map: E[x^2] = E[x]
    cells = _block_mean(variance)
    peak = cells.max()
    if peak > 0.0:
        cells = cells / peak
    return np.clip(cells, 0.0, 1.0)


def intensity_map(img: np.ndarray) -> np.ndarray:
    """64x64 map of mean block luminance scaled to [0, 1]."""
    return np.clip(_block_mean(np.asarray(img, dtype=np.float64)) / 255.0, 0.0, 1.0)


def saliency_map(img: np.ndarray) -> np.ndarray:
    """64x64 spectral-residual saliency, min-max normalized to [0, 1].

    Pipeline: downsample to 64x64 by block mean, subtract the mean (kills the
    DC bin, so an image and its negative score identically), FFT, log
    amplitude minus its 3x3 box average as the residual, inverse FFT with the
    original phase, squared magnitude, Gaussian smooth (sigma 2.5 cells),
    min-max normalize. A constant image maps to all zeros.
    """
    small = _block_mean(np.asarray(img, dtype=np.float64))
    small = small - small.mean()
    if np.abs(small).max() <= 1e-9:
        return np.zeros_like(small)
    spectrum = np.fft.fft2(small)
    amplitude = np.abs(spectrum)
    phase = np.angle(spectrum)
    # Floor the amplitude relative to its peak before the log. Synthetic
    # shapes have exact spectral nulls; an absolute epsilon turns those bins
    # into huge negative outliers that leak through the box average and
    # amplify their neighbours, drowning the object in ringing.
    log_amp = np.log(amplitude + 1e-4 * amplitude.max())
    local = ndimage.uniform_filter(log_amp, size=3, mode="wrap")
    residual = log_amp - local
    recon = np.exp(residual + 1j * phase)
    # Bins with exactly zero amplitude (the demeaned DC bin, exact nulls of
    # synthetic shapes) have no phase; keep them silent rather than letting
    # the floor resurrect them.
    recon[amplitude == 0.0] = 0.0
    sal = np.abs(np.fft.ifft2(recon)) ** 2
    sal = ndimage.gaussian_filter(sal, 2.5, mode="nearest")
    lo, hi = sal.min(), sal.max()
    if hi - lo <= 1e-12 * max(hi, 1.0):
        return np.zeros_like(sal)
    return (sal - lo) / (hi - lo)
