"""Orthonormal Haar wavelet and 8x8 DCT transforms.

Two wavelet levels feed the embedder: the first level splits the image into
LL/HL/LH/HH, the second level splits HL, LH and HH again. Seven of those
second-level bands carry the watermark; everything else rides along in a
context object so the image can be rebuilt exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

# Band naming: first two letters are the second-level quadrant, last two the
# first-level parent (LLHL = LL quadrant of HL). This is the embedding order;
# copies 2k and 2k+1 of the payload live in SUBBANDS[k].
SUBBANDS = ("LLHL", "HLHL", "LHHL", "LLLH", "HLLH", "LHLH", "LLHH")


def dwt2(x: np.ndarray):
    """One orthonormal Haar level: returns (ll, hl, lh, hh) at half size.

    For a 2x2 tile [[a, b], [c, d]]: ll = (a+b+c+d)/2, hl = (a-b+c-d)/2,
    lh = (a+b-c-d)/2, hh = (a-b-c+d)/2. hl is high-pass along rows
    (vertical edges), lh high-pass along columns.
    """
    h, w = x.shape
    if h % 2 or w % 2:
        raise ValueError(f"dwt2 needs even dimensions, got {x.shape}")
    a = x[0::2, 0::2]
    b = x[0::2, 1::2]
    c = x[1::2, 0::2]
    d = x[1::2, 1::2]
    ll = (a + b + c + d) / 2.0
    hl = (a - b + c - d) / 2.0
    lh = (a + b - c - d) / 2.0
    hh = (a - b - c + d) / 2.0
    return ll, hl, lh, hh


def idwt2(ll, hl, lh, hh) -> np.ndarray:
    """Exact inverse of dwt2."""
    h, w = ll.shape
    out = np.empty((2 * h, 2 * w), dtype=np.float64)
    out[0::2, 0::2] = (ll + hl + lh + hh) / 2.0
    out[0::2, 1::2] = (ll - hl + lh - hh) / 2.0
    out[1::2, 0::2] = (ll + hl - lh - hh) / 2.0
    out[1::2, 1::2] = (ll - hl - lh + hh) / 2.0
    return out


@dataclass
class WaveletContext:
    """Bands untouched by embedding, kept for exact resynthesis."""

    ll1: np.ndarray  # first-level LL
    hhhl: np.ndarray  # HH quadrant of HL
    hhlh: np.ndarray  # HH quadrant of LH
    hlhh: np.ndarray  # HL quadrant of HH
    lhhh: np.ndarray  # LH quadrant of HH
    hhhh: np.ndarray  # HH quadrant of HH


def decompose(img: np.ndarray):
    """Two Haar levels -> (dict of the 7 embedding bands, WaveletContext)."""
    img = np.asarray(img, dtype=np.float64)
    ll1, hl1, lh1, hh1 = dwt2(img)
    llhl, hlhl, lhhl, hhhl = dwt2(hl1)
    lllh, hllh, lhlh, hhlh = dwt2(lh1)
    llhh, hlhh, lhhh, hhhh = dwt2(hh1)
    bands = {
        "LLHL": llhl,
        "HLHL": hlhl,
        "LHHL": lhhl,
        "LLLH": lllh,
        "HLLH": hllh,
        "LHLH": lhlh,
        "LLHH": llhh,
    }
    ctx = WaveletContext(ll1, hhhl, hhlh, hlhh, lhhh, hhhh)
    return bands, ctx


def resynthesize(bands: dict, ctx: WaveletContext) -> np.ndarray:
    """Rebuild the image from the 7 embedding bands plus context."""
    hl1 = idwt2(bands["LLHL"], bands["HLHL"], bands["LHHL"], ctx.hhhl)
    lh1 = idwt2(bands["LLLH"], bands["HLLH"], bands["LHLH"], ctx.hhlh)
    hh1 = idwt2(bands["LLHH"], ctx.hlhh, ctx.lhhh, ctx.hhhh)
    return idwt2(ctx.ll1, hl1, lh1, hh1)


def dct8(block: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II of one 8x8 block."""
    if block.shape != (8, 8):
        raise ValueError(f"expected an 8x8 block, got {block.shape}")
    return dctn(block, type=2, norm="ortho")


def idct8(coeffs: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-III (inverse of dct8)."""
    if coeffs.shape != (8, 8):
        raise ValueError(f"expected an 8x8 block, got {coeffs.shape}")
    return idctn(coeffs, type=2, norm="ortho")


def dct8_tiles(tiles: np.ndarray) -> np.ndarray:
    """dct8 applied over the last two axes of a (..., 8, 8) stack."""
    return dctn(tiles, type=2, norm="ortho", axes=(-2, -1))


def idct8_tiles(tiles: np.ndarray) -> np.ndarray:
    """Inverse of dct8_tiles."""
    return idctn(tiles, type=2, norm="ortho", axes=(-2, -1))
