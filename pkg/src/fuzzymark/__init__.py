"""Blind DWT/DCT image watermarking with fuzzy-adaptive strength."""

from .watermark import EmbedConfig, embed, extract, vote

__version__ = "0.1.0"
__all__ = ["EmbedConfig", "embed", "extract", "vote", "__version__"]
