import numpy as np
import pytest

from fuzzymark import core


def test_quantize_rounds_half_away_and_clamps():
    vals = np.array([-3.0, -0.4, 0.0, 0.4, 0.5, 1.49, 1.5, 254.5, 255.0, 300.0])
    out = core.quantize(vals)
    np.testing.assert_array_equal(out, [0, 0, 0, 0, 1, 1, 2, 255, 255, 255])
    assert out.dtype == np.float64


def test_quantize_keeps_shape():
    img = np.full((3, 4), 10.5)
    assert core.quantize(img).shape == (3, 4)
    np.testing.assert_array_equal(core.quantize(img), np.full((3, 4), 11.0))


def test_as_image_accepts_lists():
    img = core.as_image([[1, 2], [3, 4]])
    assert img.dtype == np.float64
    assert img.shape == (2, 2)


@pytest.mark.parametrize(
    "bad",
    [np.zeros((2, 2, 2)), np.array([[np.nan, 0.0]]), np.array([[np.inf, 0.0]]), np.zeros((0, 4))],
)
def test_as_image_rejects(bad):
    with pytest.raises(ValueError):
        core.as_image(bad)


def test_pgm_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    img = rng.integers(0, 256, (48, 64)).astype(np.float64)
    path = tmp_path / "t.pgm"
    core.save_pgm(img, path)
    loaded = core.load_pgm(path)
    np.testing.assert_array_equal(loaded, img)
    assert loaded.dtype == np.float64


def test_pgm_header_bytes(tmp_path):
    path = tmp_path / "h.pgm"
    core.save_pgm(np.zeros((3, 5)), path)
    data = path.read_bytes()
    assert data.startswith(b"P5\n5 3\n255\n")
    assert len(data) == len(b"P5\n5 3\n255\n") + 15


def test_save_pgm_quantizes(tmp_path):
    path = tmp_path / "q.pgm"
    core.save_pgm(np.full((2, 2), 99.6), path)
    np.testing.assert_array_equal(core.load_pgm(path), np.full((2, 2), 100.0))


def test_load_pgm_handles_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n 4 2 # trailing\n255\n" + bytes(range(8)))
    img = core.load_pgm(path)
    assert img.shape == (2, 4)
    np.testing.assert_array_equal(img.ravel(), np.arange(8))


@pytest.mark.parametrize(
    "blob",
    [
        b"P2\n2 2\n255\n" + bytes(4),            # ascii magic
        b"P5\n2 2\n65535\n" + bytes(8),          # 16-bit samples
        b"P5\n2 2\n255\n" + bytes(3),            # raster too short
        b"P5\n2",                                # header cut off
        b"P5\nx 2\n255\n" + bytes(4),            # non-numeric field
        b"P5\n0 2\n255\n",                       # zero dimension
    ],
)
def test_load_pgm_rejects(tmp_path, blob):
    path = tmp_path / "bad.pgm"
    path.write_bytes(blob)
    with pytest.raises(core.FormatError):
        core.load_pgm(path)


def test_format_error_is_value_error():
    assert issubclass(core.FormatError, ValueError)


def test_to_blocks_layout():
    arr = np.arange(16, dtype=np.float64).reshape(4, 4)
    blocks = core.to_blocks(arr, size=2)
    assert blocks.shape == (2, 2, 2, 2)
    np.testing.assert_array_equal(blocks[0, 1], [[2, 3], [6, 7]])
    np.testing.assert_array_equal(blocks[1, 0], [[8, 9], [12, 13]])


def test_blocks_round_trip():
    rng = np.random.default_rng(3)
    arr = rng.normal(size=(24, 40))
    back = core.from_blocks(core.to_blocks(arr, size=8))
    np.testing.assert_array_equal(back, arr)


def test_to_blocks_rejects_misaligned():
    with pytest.raises(ValueError):
        core.to_blocks(np.zeros((10, 16)), size=8)


def test_from_blocks_rejects_non_square():
    with pytest.raises(ValueError):
        core.from_blocks(np.zeros((2, 2, 4, 8)))
