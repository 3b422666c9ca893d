"""Pixel-level helpers: bilinear resizing and sampling, edge-replicating translation."""

import numpy as np

from src.models.tensor import Tensor


def _sample_positions(in_size: int, out_size: int):
    # half-pixel centers, clamped to the valid range
    src = (np.arange(out_size, dtype=np.float64) + 0.5) * (in_size / out_size) - 0.5
    src = np.clip(src, 0.0, in_size - 1)
    lo = np.floor(src).astype(np.int64)
    hi = np.minimum(lo + 1, in_size - 1)
    return lo, hi, src - lo


def bilinear_resize(pixels: np.ndarray, out_height: int, out_width: int) -> np.ndarray:
    """
    Resize an H x W x C array with bilinear interpolation.

    Args:
        pixels: input image, any numeric dtype
        out_height: target rows
        out_width: target columns

    Returns:
        float64 array of shape (out_height, out_width, C)
    """
    pixels = np.asarray(pixels, dtype=np.float64)
    in_h, in_w = pixels.shape[:2]
    if (in_h, in_w) == (out_height, out_width):
        return pixels.copy()

    y0, y1, wy = _sample_positions(in_h, out_height)
    x0, x1, wx = _sample_positions(in_w, out_width)
    wy = wy[:, None, None]
    wx = wx[None, :, None]

    top = pixels[y0][:, x0] * (1 - wx) + pixels[y0][:, x1] * wx
    bottom = pixels[y1][:, x0] * (1 - wx) + pixels[y1][:, x1] * wx
    return top * (1 - wy) + bottom * wy


def sample_bilinear(pixels: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """
    Sample an H x W x C array at fractional pixel positions.

    Positions are clamped to the image, so samples outside replicate the edge.

    Returns:
        float64 array of shape xs.shape + (C,)
    """
    pixels = np.asarray(pixels, dtype=np.float64)
    in_h, in_w = pixels.shape[:2]
    xs = np.clip(np.asarray(xs, dtype=np.float64), 0.0, in_w - 1)
    ys = np.clip(np.asarray(ys, dtype=np.float64), 0.0, in_h - 1)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    wx = (xs - x0)[..., None]
    wy = (ys - y0)[..., None]

    top = pixels[y0, x0] * (1 - wx) + pixels[y0, x1] * wx
    bottom = pixels[y1, x0] * (1 - wx) + pixels[y1, x1] * wx
    return top * (1 - wy) + bottom * wy


def translate(image: Tensor, dx: int, dy: int) -> Tensor:
    """Shift content by (dx, dy) pixels, replicating edge pixels into the gap."""
    rows = np.clip(np.arange(image.height) - dy, 0, image.height - 1)
    cols = np.clip(np.arange(image.width) - dx, 0, image.width - 1)
    return Tensor(image.data[:, rows][:, :, cols])
