"""Image degradations used by the robustness benchmark.

Every attack takes and returns a 2-D float image with valid 8-bit sample
values (the result is clamped and rounded half away from zero). Stochastic
attacks accept a seed or a numpy Generator.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .core import as_image, quantize, to_blocks, from_blocks
from .transforms import dct8_tiles, idct8_tiles

# ITU T.81 Annex K luminance quantization table.
JPEG_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _round_half_away(x):
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def salt_pepper(img, density: float, seed=None) -> np.ndarray:
    """Set round(density * N) distinct pixels to 0 or 255, half each
    (an odd count sends the extra pixel to either extreme at random)."""
    img = as_image(img)
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    rng = _rng(seed)
    total = img.size
    count = int(np.floor(density * total + 0.5))
    out = quantize(img).ravel()
    if count:
        positions = rng.permutation(total)[:count]
        zeros = count // 2
        if count % 2 and rng.integers(2):
            zeros += 1
        out[positions[:zeros]] = 0.0
        out[positions[zeros:]] = 255.0
    return out.reshape(img.shape)


def awgn(img, sigma: float, seed=None) -> np.ndarray:
    """Add white Gaussian noise of the given standard deviation."""
    img = as_image(img)
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    noise = _rng(seed).normal(0.0, sigma, img.shape)
    return quantize(img + noise)


def gaussian_filter(img, size: int, sigma: float) -> np.ndarray:
    """Convolve with a sampled, normalized Gaussian kernel (replicate pad)."""
    img = as_image(img)
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd, got {size}")
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    radius = size // 2
    coords = np.arange(-radius, radius + 1, dtype=np.float64)
    line = np.exp(-(coords**2) / (2.0 * sigma**2))
    kernel = np.outer(line, line)
    kernel /= kernel.sum()
    return quantize(ndimage.correlate(img, kernel, mode="nearest"))


def median_filter(img, size: int) -> np.ndarray:
    """Median over a size x size window (replicate pad)."""
    img = as_image(img)
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd, got {size}")
    return quantize(ndimage.median_filter(img, size=size, mode="nearest"))


def crop(img, percent: float, mode: str = "center", fill: float = 0.0) -> np.ndarray:
    """Blank out roughly `percent` of the image area, keeping its size.

    center: a centered square of side round(sqrt(percent/100 * area)).
    around: the smallest uniform border whose area reaches the target.
    """
    img = as_image(img)
    if not 0.0 < percent < 100.0:
        raise ValueError(f"percent must be in (0, 100), got {percent}")
    h, w = img.shape
    target = percent / 100.0 * h * w
    out = quantize(img)
    if mode == "center":
        side = int(np.floor(np.sqrt(target) + 0.5))
        side = min(side, h, w)
        top = (h - side) // 2
        left = (w - side) // 2
        out[top : top + side, left : left + side] = fill
    elif mode == "around":
        width = 1
        while width <= min(h, w) // 2:
            removed = h * w - (h - 2 * width) * (w - 2 * width)
            if removed >= target:
                break
            width += 1
        out[:width, :] = fill
        out[-width:, :] = fill
        out[:, :width] = fill
        out[:, -width:] = fill
    else:
        raise ValueError(f"mode must be center or around, got {mode!r}")
    return out


def jpeg(img, quality: int) -> np.ndarray:
    """Baseline JPEG degradation model: 8x8 DCT quantization round trip.

    Annex K luminance table scaled by the usual quality rule; entropy coding
    is lossless so it is skipped. quality 100 reduces to coefficient
    rounding (all steps are 1)."""
    img = as_image(img)
    quality = int(quality)
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in 1..100, got {quality}")
    if img.shape[0] % 8 or img.shape[1] % 8:
        raise ValueError(f"image dimensions must be multiples of 8, got {img.shape}")
    if quality < 50:
        scale = 5000.0 / quality
    else:
        scale = 200.0 - 2.0 * quality
    table = np.clip(np.floor((JPEG_LUMA_TABLE * scale + 50.0) / 100.0), 1.0, 255.0)
    tiles = to_blocks(quantize(img) - 128.0)
    coeffs = dct8_tiles(tiles)
    coeffs = _round_half_away(coeffs / table) * table
    return quantize(from_blocks(idct8_tiles(coeffs)) + 128.0)
