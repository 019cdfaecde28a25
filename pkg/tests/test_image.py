import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lrfcm.errors import FormatError
from lrfcm.image import pad_symmetric, quantize, read_image, write_image


def _write(tmp_path, name, data: bytes):
    p = tmp_path / name
    p.write_bytes(data)
    return p


def test_read_ascii_pgm(tmp_path):
    p = _write(tmp_path, "a.pgm", b"P2\n2 2\n255\n0 10\n20 30\n")
    np.testing.assert_array_equal(read_image(p), [[0, 10], [20, 30]])


def test_binary_and_ascii_agree(tmp_path):
    ascii_ = _write(tmp_path, "a.pgm", b"P2\n# a comment\n3 1\n255\n1 2 250\n")
    binary = _write(tmp_path, "b.pgm", b"P5\n3 1\n255\n" + bytes([1, 2, 250]))
    np.testing.assert_array_equal(read_image(ascii_), read_image(binary))


def test_ppm_equal_planes(tmp_path):
    px = bytes([7, 7, 7, 200, 200, 200])
    img = read_image(_write(tmp_path, "c.ppm", b"P6\n2 1\n255\n" + px))
    assert img.shape == (1, 2, 3)
    np.testing.assert_array_equal(img[..., 0], img[..., 1])
    np.testing.assert_array_equal(img[..., 1], img[..., 2])


def test_ascii_ppm(tmp_path):
    img = read_image(_write(tmp_path, "c.ppm", b"P3\n1 1\n255\n1 2 3\n"))
    np.testing.assert_array_equal(img[0, 0], [1, 2, 3])


def test_sixteen_bit_rescaled(tmp_path):
    raw = np.array([0, 65535, 32768], dtype=">u2").tobytes()
    img = read_image(_write(tmp_path, "d.pgm", b"P5\n3 1\n65535\n" + raw))
    np.testing.assert_allclose(img[0], [0.0, 255.0, 32768 * 255.0 / 65535.0])


@pytest.mark.parametrize(
    "data, offset",
    [
        (b"P7\n1 1\n255\n\x00", 0),
        (b"P5\n2 x\n", 5),
        (b"P5\n0 1\n255\n", None),
        (b"P5\n2 2\n255\n\x00", None),
        (b"P2\n2 1\n9\n3 10\n", None),
    ],
)
def test_malformed_headers(tmp_path, data, offset):
    with pytest.raises(FormatError) as ei:
        read_image(_write(tmp_path, "bad.pgm", data))
    if offset is not None:
        assert ei.value.offset == offset
        assert f"byte {offset}" in str(ei.value)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        read_image(tmp_path / "none.pgm")


def test_write_clamps_and_rounds(tmp_path):
    p = tmp_path / "q.pgm"
    write_image(np.array([[255.7, -3.0, 2.5, 1.49]]), p)
    np.testing.assert_array_equal(read_image(p), [[255, 0, 3, 1]])


def test_quantize_half_away_from_zero():
    np.testing.assert_array_equal(quantize([0.5, 1.5, 2.5, 254.5]), [1, 2, 3, 255])


@pytest.mark.parametrize("ext", [".pgm", ".png"])
def test_gray_round_trip(tmp_path, ext):
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, (5, 7)).astype(float)
    p = tmp_path / f"x{ext}"
    write_image(img, p)
    np.testing.assert_array_equal(read_image(p), img)


@pytest.mark.parametrize("ext", [".ppm", ".png"])
def test_color_round_trip(tmp_path, ext):
    rng = np.random.default_rng(2)
    img = rng.integers(0, 256, (4, 3, 3)).astype(float)
    p = tmp_path / f"x{ext}"
    write_image(img, p)
    np.testing.assert_array_equal(read_image(p), img)


def test_codec_mismatch_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_image(np.zeros((2, 2, 3)), tmp_path / "x.pgm")
    with pytest.raises(ValueError):
        write_image(np.zeros((2, 2)), tmp_path / "x.ppm")
    with pytest.raises(ValueError):
        write_image(np.zeros((2, 2)), tmp_path / "x.bmp")


def test_write_rejects_nan(tmp_path):
    with pytest.raises(ValueError):
        write_image(np.array([[np.nan]]), tmp_path / "x.pgm")


def test_pad_examples():
    np.testing.assert_array_equal(pad_symmetric([[1, 2, 3]] * 3, 1)[1], [1, 1, 2, 3, 3])
    img = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(pad_symmetric(img, 0), img)
    np.testing.assert_array_equal(pad_symmetric(np.full((3, 3), 7.0), 2), np.full((7, 7), 7.0))


def test_pad_rejects_large_margin():
    with pytest.raises(ValueError):
        pad_symmetric(np.zeros((3, 3)), 4)
    with pytest.raises(ValueError):
        pad_symmetric(np.zeros((3, 3)), -1)


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9))))
def test_read_write_read_identity(tmp_path_factory, data):
    p = tmp_path_factory.mktemp("rt") / "x.pgm"
    write_image(data.astype(float), p)
    first = read_image(p)
    write_image(first, p)
    np.testing.assert_array_equal(read_image(p), first)
    np.testing.assert_array_equal(first, data)


@settings(max_examples=60, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(2, 8), st.integers(2, 8)), elements=st.floats(-50, 50)),
    st.integers(0, 2),
)
def test_pad_preserves_range(img, margin):
    out = pad_symmetric(img, margin)
    assert out.shape == (img.shape[0] + 2 * margin, img.shape[1] + 2 * margin)
    assert out.min() == img.min() and out.max() == img.max()
