"""Reader and writer for the little-endian BLZW weight file format.

Layout:
    magic "BLZW" | u32 version | u32 tensor count
    per tensor: u32 name length | name (ASCII) | u32 rank | rank x u32 dims | float32 data
"""

import math
import struct
from collections import OrderedDict
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from config.settings import WEIGHT_FORMAT_VERSION, WEIGHT_MAGIC
from src.models.errors import WeightFileError
from src.models.network import NetworkSpec
from src.models.weights import WeightStore
from src.utils.logger import get_logger

logger = get_logger(__name__)

_U32 = struct.Struct("<I")
_FLOAT = np.dtype("<f4")
HEADER_SIZE = len(WEIGHT_MAGIC) + 2 * _U32.size


def encode_weights(store: WeightStore) -> bytes:
    """Serialize a store to bytes in insertion order."""
    parts = [WEIGHT_MAGIC, _U32.pack(WEIGHT_FORMAT_VERSION), _U32.pack(len(store))]
    for name, array in store.items():
        encoded = name.encode("ascii")
        parts.append(_U32.pack(len(encoded)))
        parts.append(encoded)
        parts.append(_U32.pack(array.ndim))
        parts.extend(_U32.pack(d) for d in array.shape)
        parts.append(np.ascontiguousarray(array, dtype=_FLOAT).tobytes())
    return b"".join(parts)


def save_weights(store: WeightStore, path: Path) -> None:
    """Write `store` to `path`."""
    path = Path(path)
    data = encode_weights(store)
    path.write_bytes(data)
    logger.info(f"Wrote {len(store)} tensors ({len(data)} bytes) to {path}")


class _Cursor:
    """Sequential reader that reports truncation with the failing offset."""

    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        available = len(self.data) - self.offset
        if available < size:
            raise WeightFileError(f"Truncated weight file reading {what}: expected {size} bytes, got {available}",
                                  offset=self.offset, expected=self.offset + size, actual=len(self.data))
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(_U32.size, what))[0]


def _read_tensor(cursor: _Cursor, index: int) -> Tuple[str, np.ndarray]:
    name_offset = cursor.offset
    raw_name = cursor.take(cursor.u32(f"tensor {index} name length"), f"tensor {index} name")
    try:
        name = raw_name.decode("ascii")
    except UnicodeDecodeError:
        raise WeightFileError(f"Tensor {index} name is not ASCII", offset=name_offset) from None
    if not name:
        raise WeightFileError(f"Tensor {index} has an empty name", offset=name_offset)

    rank = cursor.u32(f"rank of {name}")
    dims = tuple(cursor.u32(f"dimension {axis} of {name}") for axis in range(rank))
    count = math.prod(dims)
    size = count * _FLOAT.itemsize
    available = len(cursor.data) - cursor.offset
    if size > available:
        raise WeightFileError(f"Tensor '{name}' of shape {dims} needs {size} bytes, only {available} remain",
                              offset=cursor.offset, expected=cursor.offset + size, actual=len(cursor.data))
    data = cursor.take(size, f"data of {name}")
    array = np.frombuffer(data, dtype=_FLOAT).astype(np.float32).reshape(dims)
    return name, array


def decode_weights(data: bytes) -> WeightStore:
    """
    Parse BLZW bytes into a WeightStore.

    Raises:
        WeightFileError: bad magic, unsupported version, duplicate names,
            trailing bytes or truncation; carries the byte offset
    """
    cursor = _Cursor(data)
    magic = cursor.take(len(WEIGHT_MAGIC), "magic")
    if magic != WEIGHT_MAGIC:
        raise WeightFileError(f"Bad magic {magic!r}, expected {WEIGHT_MAGIC!r}", offset=0,
                              expected=WEIGHT_MAGIC, actual=magic)
    version = cursor.u32("version")
    if version != WEIGHT_FORMAT_VERSION:
        raise WeightFileError(f"Unsupported format version {version}", offset=len(WEIGHT_MAGIC),
                              expected=WEIGHT_FORMAT_VERSION, actual=version)
    count = cursor.u32("tensor count")

    tensors = OrderedDict()
    for index in range(count):
        start = cursor.offset
        name, array = _read_tensor(cursor, index)
        if name in tensors:
            raise WeightFileError(f"Duplicate tensor name '{name}'", offset=start)
        tensors[name] = array

    if cursor.offset != len(data):
        raise WeightFileError(f"{len(data) - cursor.offset} trailing bytes after {count} tensors",
                              offset=cursor.offset, expected=cursor.offset, actual=len(data))
    return WeightStore(tensors, format_version=version)


def load_weights(path: Path, spec: Optional[NetworkSpec] = None) -> WeightStore:
    """
    Load a weight file, optionally auditing it against a network spec.

    Args:
        path: BLZW file
        spec: when given, names and shapes are validated against it

    Returns:
        Immutable WeightStore
    """
    path = Path(path)
    store = decode_weights(path.read_bytes())
    if spec is not None:
        store.validate(spec)
    logger.debug(f"Loaded {len(store)} tensors from {path}")
    return store
