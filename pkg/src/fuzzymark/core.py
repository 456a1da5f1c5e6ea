"""Grayscale image I/O and block utilities.

Images are plain 2-D float64 numpy arrays in sample units (0..255).
Files are binary PGM (P5) with maxval 255.
"""

from __future__ import annotations

import numpy as np


class FormatError(ValueError):
    """Raised for malformed or unsupported image files."""


def as_image(arr) -> np.ndarray:
    """Validate and convert to a 2-D float64 image array."""
    img = np.asarray(arr, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2-D array, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite samples")
    return img


def quantize(img: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero. Returns float64."""
    clipped = np.clip(np.asarray(img, dtype=np.float64), 0.0, 255.0)
    return np.floor(clipped + 0.5)


def _read_header_tokens(data: bytes, count: int, pos: int):
    """Read whitespace/comment separated ASCII tokens from a PGM header."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        if pos == start:
            raise FormatError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def load_pgm(path) -> np.ndarray:
    """Load a binary PGM (P5, maxval 255) as a float64 image."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P5":
        raise FormatError("not a binary PGM file (missing P5 magic)")
    tokens, pos = _read_header_tokens(data, 3, 2)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise FormatError(f"non-numeric PGM header field: {exc}") from None
    if width <= 0 or height <= 0:
        raise FormatError(f"bad PGM dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"unsupported PGM maxval {maxval} (only 255)")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise FormatError("PGM raster shorter than header promises")
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return img.astype(np.float64)


def save_pgm(img: np.ndarray, path) -> None:
    """Quantize and write a binary PGM (P5, maxval 255)."""
    img = as_image(img)
    samples = quantize(img).astype(np.uint8)
    height, width = samples.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(samples.tobytes())


def to_blocks(arr: np.ndarray, size: int = 8) -> np.ndarray:
    """Split a 2-D array into a (rows, cols, size, size) grid of tiles.

    Row-major: block (i, j) covers arr[i*size:(i+1)*size, j*size:(j+1)*size].
    """
    h, w = arr.shape
    if h % size or w % size:
        raise ValueError(f"array shape {arr.shape} not divisible by {size}")
    return (
        arr.reshape(h // size, size, w // size, size).transpose(0, 2, 1, 3).copy()
    )


def from_blocks(blocks: np.ndarray) -> np.ndarray:
    """Inverse of to_blocks."""
    rows, cols, size, size2 = blocks.shape
    if size != size2:
        raise ValueError("blocks must be square")
    return blocks.transpose(0, 2, 1, 3).reshape(rows * size, cols * size)
