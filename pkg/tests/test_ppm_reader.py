"""Tests for PPM decoding, resizing and translation."""

import numpy as np
import pytest

from src.models.errors import ImageFormatError
from src.models.tensor import Tensor
from src.parsers.ppm_reader import decode_ppm, encode_ppm, load_image
from src.utils.image_ops import bilinear_resize, translate
from tests.reference_ops import bilinear_sample


class TestDecodePpm:
    """Test suite for the P6 decoder."""

    def test_header_with_comments(self):
        data = b"P6\n# made by hand\n2 1 # width height\n255\n" + bytes([1, 2, 3, 4, 5, 6])
        pixels = decode_ppm(data)
        assert pixels.shape == (1, 2, 3)
        assert pixels[0, 1].tolist() == [4, 5, 6]

    def test_encode_decode(self, rng):
        pixels = rng.integers(0, 256, size=(5, 7, 3), dtype=np.uint8)
        np.testing.assert_array_equal(decode_ppm(encode_ppm(pixels)), pixels)

    def test_bad_magic(self):
        with pytest.raises(ImageFormatError) as exc_info:
            decode_ppm(b"P3\n1 1\n255\n0 0 0\n")
        assert exc_info.value.offset == 0

    def test_sixteen_bit_rejected(self):
        with pytest.raises(ImageFormatError, match="8-bit"):
            decode_ppm(b"P6\n1 1\n65535\n" + bytes(6))

    def test_zero_maxval_rejected(self):
        with pytest.raises(ImageFormatError):
            decode_ppm(b"P6\n1 1\n0\n" + bytes(3))

    def test_short_pixel_data(self):
        with pytest.raises(ImageFormatError, match="Short pixel data"):
            decode_ppm(b"P6\n2 2\n255\n" + bytes(11))

    def test_zero_dimension(self):
        with pytest.raises(ImageFormatError):
            decode_ppm(b"P6\n0 4\n255\n")

    def test_malformed_header(self):
        with pytest.raises(ImageFormatError, match="decimal"):
            decode_ppm(b"P6\nwide 4\n255\n")

    def test_low_maxval_rescaled(self):
        pixels = decode_ppm(b"P6\n2 1\n15\n" + bytes([0, 7, 15, 15, 15, 15]))
        assert pixels.dtype == np.uint8
        assert pixels[0, 0].tolist() == [0, 119, 255]
        assert pixels[0, 1].tolist() == [255, 255, 255]

    def test_sample_above_maxval(self):
        with pytest.raises(ImageFormatError, match="exceeds maxval") as exc_info:
            decode_ppm(b"P6\n1 1\n15\n" + bytes([3, 16, 0]))
        assert exc_info.value.offset == len(b"P6\n1 1\n15\n") + 1


class TestLoadImage:
    """Test suite for loading network input tensors."""

    def test_white_is_one(self, write_ppm):
        image = load_image(write_ppm(np.full((40, 60, 3), 255)))
        assert image.dims == (1, 128, 128, 3)
        assert np.all(image.data == 1.0)

    def test_black_is_minus_one(self, write_ppm):
        assert np.all(load_image(write_ppm(np.zeros((9, 9, 3)))).data == -1.0)

    def test_low_maxval_white_is_one(self, tmp_path):
        path = tmp_path / "low.ppm"
        path.write_bytes(b"P6\n2 2\n15\n" + bytes([15] * 12))
        assert np.all(load_image(path).data == 1.0)

    def test_checkerboard_matches_hand_interpolation(self, write_ppm):
        board = np.array([[[0] * 3, [255] * 3], [[255] * 3, [0] * 3]], dtype=np.uint8)
        image = load_image(write_ppm(board))
        for y in (0, 31, 32, 63, 64, 95, 96, 127):
            for x in (0, 64):
                expected = bilinear_sample(board, 128, y, x) / 127.5 - 1.0
                np.testing.assert_allclose(image.data[0, y, x], expected, atol=1e-6)

    def test_native_size_is_unchanged(self, write_ppm, rng):
        pixels = rng.integers(0, 256, size=(128, 128, 3), dtype=np.uint8)
        image = load_image(write_ppm(pixels))
        np.testing.assert_array_equal(image.data[0], (pixels / 127.5 - 1.0).astype(np.float32))

    def test_values_in_range(self, write_ppm, rng):
        image = load_image(write_ppm(rng.integers(0, 256, size=(33, 200, 3))))
        assert image.data.min() >= -1.0 and image.data.max() <= 1.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_image(tmp_path / "absent.ppm")


class TestImageOps:
    """Test suite for resizing and translation helpers."""

    def test_resize_constant(self):
        out = bilinear_resize(np.full((3, 5, 3), 17.0), 8, 2)
        assert out.shape == (8, 2, 3)
        assert np.all(out == 17.0)

    def test_resize_matches_reference(self, rng):
        pixels = rng.integers(0, 256, size=(6, 6, 3))
        out = bilinear_resize(pixels, 16, 16)
        for y, x in [(0, 0), (3, 7), (15, 15), (8, 2)]:
            np.testing.assert_allclose(out[y, x], bilinear_sample(pixels, 16, y, x))

    def test_translate_replicates_edges(self):
        data = np.arange(16, dtype=np.float32).reshape(1, 4, 4, 1)
        shifted = translate(Tensor(data), dx=1, dy=0).data[0, :, :, 0]
        np.testing.assert_array_equal(shifted[:, 0], data[0, :, 0, 0])
        np.testing.assert_array_equal(shifted[:, 1:], data[0, :, :3, 0])

    def test_translate_down(self):
        data = np.arange(16, dtype=np.float32).reshape(1, 4, 4, 1)
        shifted = translate(Tensor(data), dx=0, dy=-2).data[0, :, :, 0]
        np.testing.assert_array_equal(shifted[:2], data[0, 2:, :, 0])
        np.testing.assert_array_equal(shifted[2], data[0, 3, :, 0])

    def test_zero_shift_is_identity(self, random_image):
        np.testing.assert_array_equal(translate(random_image, 0, 0).data, random_image.data)
