"""Shared fixtures: standard test covers and a watermarked set."""

from types import SimpleNamespace

import numpy as np
import pytest

from fuzzymark import cli, core, fuzzy, watermark

IMAGE_NAMES = ("brick", "camera", "grass", "gravel", "moon")


@pytest.fixture(scope="session")
def images():
    """Five 512x512 grayscale covers from scikit-image, as float64."""
    from skimage import data

    out = {}
    for name in IMAGE_NAMES:
        img = np.asarray(getattr(data, name)(), dtype=np.float64)
        assert img.shape == (512, 512)
        out[name] = img
    return out


@pytest.fixture(scope="session")
def camera(images):
    return images["camera"]


@pytest.fixture(scope="session")
def default_fis():
    return fuzzy.default_fis()


@pytest.fixture(scope="session")
def marked_set(images, default_fis):
    """Each cover embedded with its own payload, quantized to 8 bits."""
    out = {}
    for idx, name in enumerate(IMAGE_NAMES):
        cover = images[name]
        bits = watermark.random_payload(1000 + idx)
        strength, _ = cli.compute_strength(cover, default_fis)
        marked = core.quantize(watermark.embed(cover, bits, strength))
        out[name] = SimpleNamespace(
            cover=cover, bits=bits, strength=strength, marked=marked
        )
    return out


@pytest.fixture(scope="session")
def cover_dir(images, tmp_path_factory):
    """The covers written out as PGM files, for CLI runs."""
    root = tmp_path_factory.mktemp("covers")
    for name, img in images.items():
        core.save_pgm(img, root / f"{name}.pgm")
    return root
