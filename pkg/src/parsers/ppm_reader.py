"""Binary PPM (P6) decoding into normalized network input tensors."""

from pathlib import Path
from typing import List, Tuple

import numpy as np

from config.settings import INPUT_SIZE, PPM_MAGIC, PPM_MAX_VALUE
from src.models.errors import ImageFormatError
from src.models.tensor import Tensor
from src.utils.image_ops import bilinear_resize
from src.utils.logger import get_logger

logger = get_logger(__name__)


def _read_header(data: bytes) -> Tuple[List[int], int]:
    """Parse width, height and maxval; return them with the pixel data offset."""
    if not data.startswith(PPM_MAGIC):
        raise ImageFormatError(f"Not a binary PPM (expected magic {PPM_MAGIC!r}, got {data[:2]!r})", offset=0)

    values: List[int] = []
    pos = len(PPM_MAGIC)
    while len(values) < 3:
        # whitespace and comments between tokens
        while pos < len(data) and (data[pos:pos + 1].isspace() or data[pos:pos + 1] == b"#"):
            if data[pos:pos + 1] == b"#":
                end = data.find(b"\n", pos)
                pos = len(data) if end < 0 else end + 1
            else:
                pos += 1
        start = pos
        while pos < len(data) and data[pos:pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise ImageFormatError("Malformed PPM header: expected a decimal number", offset=start)
        values.append(int(data[start:pos]))

    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise ImageFormatError("Malformed PPM header: missing separator before pixel data", offset=pos)
    return values, pos + 1


def decode_ppm(data: bytes) -> np.ndarray:
    """
    Decode P6 bytes into an H x W x 3 uint8 array on the 0..255 scale.

    Files with a maxval below 255 are rescaled so that maxval maps to 255.

    Raises:
        ImageFormatError: wrong magic, bad header, short pixel data or a
            sample above maxval
    """
    (width, height, max_value), offset = _read_header(data)
    if width < 1 or height < 1:
        raise ImageFormatError(f"Invalid PPM dimensions {width}x{height}", offset=len(PPM_MAGIC))
    if not 0 < max_value <= PPM_MAX_VALUE:
        raise ImageFormatError(f"Only 8-bit PPM is supported (maxval {max_value})", offset=len(PPM_MAGIC))

    expected = width * height * 3
    available = len(data) - offset
    if available < expected:
        raise ImageFormatError(f"Short pixel data: expected {expected} bytes, got {available}",
                               offset=offset + available)
    pixels = np.frombuffer(data, dtype=np.uint8, count=expected, offset=offset).reshape(height, width, 3)
    if max_value == PPM_MAX_VALUE:
        return pixels

    above = np.flatnonzero(pixels.reshape(-1) > max_value)
    if above.size:
        raise ImageFormatError(f"Sample {pixels.reshape(-1)[above[0]]} exceeds maxval {max_value}",
                               offset=offset + int(above[0]))
    logger.debug(f"Rescaling maxval {max_value} to {PPM_MAX_VALUE}")
    return np.rint(pixels * (PPM_MAX_VALUE / max_value)).astype(np.uint8)


def load_image(path: Path, size: int = INPUT_SIZE) -> Tensor:
    """
    Load a P6 image as a 1 x size x size x 3 tensor with values in [-1, 1].

    Args:
        path: PPM file path
        size: square network input size

    Returns:
        RGB tensor, v / 127.5 - 1 after bilinear resizing
    """
    path = Path(path)
    pixels = decode_ppm(path.read_bytes())
    logger.debug(f"Loaded {path.name}: {pixels.shape[1]}x{pixels.shape[0]}")
    resized = bilinear_resize(pixels, size, size)
    return Tensor((resized / 127.5 - 1.0)[None].astype(np.float32))


def encode_ppm(pixels: np.ndarray) -> bytes:
    """Encode an H x W x 3 uint8 array as P6 bytes."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    height, width = pixels.shape[:2]
    header = b"%s\n%d %d\n%d\n" % (PPM_MAGIC, width, height, PPM_MAX_VALUE)
    return header + pixels.tobytes()
