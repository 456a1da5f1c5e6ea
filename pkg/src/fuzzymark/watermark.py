"""Blind watermark embedding, extraction and majority voting.

A 128-bit payload is embedded 14 times: twice in each of the seven
second-level wavelet bands. Every band is cut into 256 8x8 blocks; a block
carries one bit in the ordering of the DCT coefficient pair (5, 6)/(6, 5)
(zero-based row, col). Bit 1 forces coeff_b >= coeff_a by a margin, bit 0
the reverse. The margin scales with the local fuzzy strength, the band's
gain, and the larger coefficient magnitude (floored), so busy regions take
stronger marks. Extraction re-reads the orderings (ties count as 1) and a
majority vote over the 14 copies yields the payload.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import as_image, from_blocks, to_blocks
from .transforms import SUBBANDS, dct8_tiles, decompose, idct8_tiles, resynthesize

PAYLOAD_BITS = 128
COPIES = 14

# Block offset (mod 128, within each half of a band's 256 blocks) applied to
# each of the 14 copies. Spreading the copies of one bit over distinct image
# regions keeps a localized attack from occupying a voting majority: any
# center crop up to 25% of the area overlaps at most 6 of a bit's 14 home
# blocks (see tests). Offset j belongs to band SUBBANDS[j // 2], half j % 2.
DEFAULT_COPY_OFFSETS = tuple((37 * j) % 128 for j in range(COPIES))


@dataclass(frozen=True)
class EmbedConfig:
    coeff_a: tuple = (5, 6)
    coeff_b: tuple = (6, 5)
    band_gains: dict = field(
        default_factory=lambda: {"HL": 0.45, "LH": 0.45, "HH": 0.1}
    )
    margin_floor: float = 500.0
    vote_threshold: int = 6
    copy_offsets: tuple = DEFAULT_COPY_OFFSETS

    def __post_init__(self):
        for name in ("coeff_a", "coeff_b"):
            pos = tuple(int(v) for v in getattr(self, name))
            if len(pos) != 2 or not all(0 <= v < 8 for v in pos):
                raise ValueError(f"{name} must be two indices in 0..7, got {pos}")
            object.__setattr__(self, name, pos)
        if self.coeff_a == self.coeff_b:
            raise ValueError("coeff_a and coeff_b must differ")
        if set(self.band_gains) != {"HL", "LH", "HH"}:
            raise ValueError(f"band_gains needs HL/LH/HH, got {set(self.band_gains)}")
        if self.margin_floor < 0:
            raise ValueError("margin_floor must be >= 0")
        if not 0 <= self.vote_threshold < COPIES:
            raise ValueError("vote_threshold must be in 0..13")
        offsets = tuple(int(v) % 128 for v in self.copy_offsets)
        if len(offsets) != COPIES:
            raise ValueError(f"copy_offsets needs {COPIES} entries")
        object.__setattr__(self, "copy_offsets", offsets)

    @classmethod
    def from_dict(cls, d: dict) -> "EmbedConfig":
        cfg = cls()
        known = {
            "coeff_a": tuple, "coeff_b": tuple, "band_gains": dict,
            "margin_floor": float, "vote_threshold": int, "copy_offsets": tuple,
        }
        updates = {}
        for key, value in d.items():
            if key not in known:
                raise ValueError(f"unknown embed config key {key!r}")
            updates[key] = known[key](value)
        return replace(cfg, **updates)

    def to_dict(self) -> dict:
        return {
            "coeff_a": list(self.coeff_a),
            "coeff_b": list(self.coeff_b),
            "band_gains": dict(self.band_gains),
            "margin_floor": self.margin_floor,
            "vote_threshold": self.vote_threshold,
            "copy_offsets": list(self.copy_offsets),
        }


def band_gain(cfg: EmbedConfig, band: str) -> float:
    """Gain for a band, keyed by its first-level parent (last two letters)."""
    return float(cfg.band_gains[band[2:]])


def parse_payload(text: str) -> np.ndarray:
    bits = text.strip()
    if len(bits) != PAYLOAD_BITS or set(bits) - {"0", "1"}:
        raise ValueError(f"payload must be {PAYLOAD_BITS} chars of 0/1")
    return np.array([int(ch) for ch in bits], dtype=np.int64)


def format_payload(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


def random_payload(seed) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 2, PAYLOAD_BITS, dtype=np.int64)


def _check_payload(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size != PAYLOAD_BITS or not np.isin(bits, (0, 1)).all():
        raise ValueError(f"payload must be {PAYLOAD_BITS} bits of 0/1")
    return bits


def embed_bit(a: float, b: float, bit: int, alpha: float, margin_floor: float):
    """Reference single-pair rule; embed() applies the same math vectorized.

    The required signed gap is delta = alpha * max(|a|, |b|, margin_floor).
    A pair already ordered with that gap is left alone; otherwise both
    coefficients move symmetrically about their mean.
    """
    delta = alpha * max(abs(a), abs(b), margin_floor)
    sign = 1.0 if bit else -1.0
    if (b - a) * sign >= delta:
        return a, b
    mid = (a + b) / 2.0
    return mid - sign * delta / 2.0, mid + sign * delta / 2.0


def _block_order(offset: int) -> np.ndarray:
    return (np.arange(PAYLOAD_BITS) + offset) % PAYLOAD_BITS


def _band_alphas(cfg: EmbedConfig, strength: np.ndarray, band: str) -> np.ndarray:
    """Per-block strength for one band: gain times the mean of the 4x4
    strength-map patch under each 8x8 coefficient block."""
    patch_means = strength.reshape(16, 4, 16, 4).mean(axis=(1, 3))
    return band_gain(cfg, band) * patch_means.ravel()


def embed(img, payload, strength, cfg: EmbedConfig | None = None) -> np.ndarray:
    """Embed the payload; returns the real-valued watermarked image.

    strength is the 64x64 fuzzy strength map. Quantization to 8 bits is
    deliberately left to the caller (saving already does it).
    """
    cfg = cfg or EmbedConfig()
    img = as_image(img)
    if img.shape != (512, 512):
        raise ValueError(f"cover must be 512x512, got {img.shape}")
    bits = _check_payload(payload)
    strength = np.asarray(strength, dtype=np.float64)
    if strength.shape != (64, 64):
        raise ValueError(f"strength map must be 64x64, got {strength.shape}")
    if not np.isfinite(strength).all() or strength.min() < 0.0:
        raise ValueError("strength map must be finite and non-negative")

    ra, ca = cfg.coeff_a
    rb, cb = cfg.coeff_b
    bands, ctx = decompose(img)
    for k, name in enumerate(SUBBANDS):
        tiles = to_blocks(bands[name]).reshape(256, 8, 8)
        coeffs = dct8_tiles(tiles)
        alphas = _band_alphas(cfg, strength, name)
        a = coeffs[:, ra, ca]
        b = coeffs[:, rb, cb]
        for half in (0, 1):
            idx = half * PAYLOAD_BITS + _block_order(cfg.copy_offsets[2 * k + half])
            av, bv, alpha = a[idx], b[idx], alphas[idx]
            delta = alpha * np.maximum(np.maximum(np.abs(av), np.abs(bv)), cfg.margin_floor)
            sign = np.where(bits == 1, 1.0, -1.0)
            keep = (bv - av) * sign >= delta
            mid = (av + bv) / 2.0
            a[idx] = np.where(keep, av, mid - sign * delta / 2.0)
            b[idx] = np.where(keep, bv, mid + sign * delta / 2.0)
        coeffs[:, ra, ca] = a
        coeffs[:, rb, cb] = b
        bands[name] = from_blocks(idct8_tiles(coeffs).reshape(16, 16, 8, 8))
    return resynthesize(bands, ctx)


def extract(img, cfg: EmbedConfig | None = None) -> np.ndarray:
    """Read all 14 payload copies; returns a (14, 128) 0/1 array.

    Row 2k + h is half h of band SUBBANDS[k]. Blind: needs only the config.
    Equal coefficients read as 1.
    """
    cfg = cfg or EmbedConfig()
    img = as_image(img)
    if img.shape != (512, 512):
        raise ValueError(f"image must be 512x512, got {img.shape}")
    ra, ca = cfg.coeff_a
    rb, cb = cfg.coeff_b
    bands, _ = decompose(img)
    raw = np.empty((COPIES, PAYLOAD_BITS), dtype=np.int64)
    for k, name in enumerate(SUBBANDS):
        coeffs = dct8_tiles(to_blocks(bands[name]).reshape(256, 8, 8))
        a = coeffs[:, ra, ca]
        b = coeffs[:, rb, cb]
        for half in (0, 1):
            idx = half * PAYLOAD_BITS + _block_order(cfg.copy_offsets[2 * k + half])
            raw[2 * k + half] = (b[idx] >= a[idx]).astype(np.int64)
    return raw


def vote(raw: np.ndarray, threshold: int | None = None, cfg: EmbedConfig | None = None) -> np.ndarray:
    """Majority vote over the copy rows: bit i is 1 iff more than
    `threshold` copies read 1 (default 6 of 14)."""
    raw = np.asarray(raw, dtype=np.int64)
    if raw.ndim != 2 or raw.shape[1] != PAYLOAD_BITS:
        raise ValueError(f"expected (copies, {PAYLOAD_BITS}), got {raw.shape}")
    if threshold is None:
        threshold = (cfg or EmbedConfig()).vote_threshold
    return (raw.sum(axis=0) > threshold).astype(np.int64)
