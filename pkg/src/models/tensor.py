"""Dense NHWC tensor and convolution parameter models."""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from src.models.errors import ShapeError

AXES = ("batch", "height", "width", "channels")


class Padding(str, Enum):
    SAME = "same"
    VALID = "valid"


class ConvKind(str, Enum):
    FULL = "full"
    DEPTHWISE = "depthwise"
    POINTWISE = "pointwise"


@dataclass(frozen=True)
class Tensor:
    """Rank-4 float32 tensor in batch/height/width/channels order.

    The wrapped array is made read-only on construction.
    """
    data: np.ndarray

    def __post_init__(self):
        array = np.array(self.data, dtype=np.float32, order="C", copy=True)
        if array.ndim != 4:
            raise ShapeError(f"Tensor must be rank 4, got rank {array.ndim}",
                             axis="rank", expected=4, actual=array.ndim)
        for axis, size in zip(AXES, array.shape):
            if size < 1:
                raise ShapeError(f"Tensor {axis} must be >= 1, got {size}",
                                 axis=axis, expected=">= 1", actual=size)
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @classmethod
    def zeros(cls, batch: int, height: int, width: int, channels: int) -> "Tensor":
        return cls(np.zeros((batch, height, width, channels), dtype=np.float32))

    @property
    def dims(self) -> Tuple[int, int, int, int]:
        return tuple(int(d) for d in self.data.shape)

    @property
    def batch(self) -> int:
        return self.dims[0]

    @property
    def height(self) -> int:
        return self.dims[1]

    @property
    def width(self) -> int:
        return self.dims[2]

    @property
    def channels(self) -> int:
        return self.dims[3]

    def __len__(self) -> int:
        return int(self.data.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.dims, self.data.tobytes()))


@dataclass(frozen=True)
class ConvParams:
    """Static description of one convolution."""
    kernel: Tuple[int, int]
    stride: int
    padding: Padding
    kind: ConvKind
    in_channels: int
    out_channels: int

    def __post_init__(self):
        kh, kw = self.kernel
        if kh < 1 or kw < 1:
            raise ShapeError(f"Kernel must be at least 1x1, got {kh}x{kw}",
                             axis="kernel", expected=">= 1", actual=self.kernel)
        if self.stride < 1:
            raise ShapeError(f"Stride must be >= 1, got {self.stride}",
                             axis="stride", expected=">= 1", actual=self.stride)
        if self.kind == ConvKind.POINTWISE and (kh, kw) != (1, 1):
            raise ShapeError("Pointwise convolution requires a 1x1 kernel",
                             axis="kernel", expected=(1, 1), actual=self.kernel)
        if self.kind == ConvKind.DEPTHWISE and self.out_channels != self.in_channels:
            raise ShapeError("Depthwise convolution keeps the channel count",
                             axis="channels", expected=self.in_channels,
                             actual=self.out_channels)

    @property
    def weight_shape(self) -> Tuple[int, int, int, int]:
        kh, kw = self.kernel
        if self.kind == ConvKind.DEPTHWISE:
            return (kh, kw, self.in_channels, 1)
        return (kh, kw, self.in_channels, self.out_channels)

    def output_size(self, size: int) -> int:
        """Spatial output size for an input of `size` along one axis."""
        return output_size(size, self.kernel[0], self.stride, self.padding)


def output_size(size: int, kernel: int, stride: int, padding: Padding) -> int:
    if Padding(padding) == Padding.SAME:
        return -(-size // stride)
    return (size - kernel) // stride + 1


def same_padding(size: int, kernel: int, stride: int) -> Tuple[int, int]:
    """Leading/trailing pad; the smaller half leads."""
    out = -(-size // stride)
    total = max((out - 1) * stride + kernel - size, 0)
    return total // 2, total - total // 2
