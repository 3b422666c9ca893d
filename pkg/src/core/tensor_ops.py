"""Convolution and activation primitives over NHWC tensors.

All functions are pure: inputs are never modified and results are new
read-only tensors. Convolutions accumulate in float64 and round once to
float32. Output rows may be split across a thread pool (see `parallelism`);
each output element is summed in the same order either way, so results are
bit-identical to the serial path.
"""

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Iterator, Sequence

import numpy as np

from src.models.errors import ShapeError
from src.models.tensor import AXES, ConvKind, ConvParams, Padding, Tensor, output_size, same_padding


_WEIGHT_AXES = ("kernel_height", "kernel_width", "in_channels", "out_channels")

_num_threads = 1


def set_num_threads(count: int) -> None:
    """Set the number of worker threads used to split convolution rows."""
    global _num_threads
    if count < 1:
        raise ValueError(f"Thread count must be >= 1, got {count}")
    _num_threads = count


def get_num_threads() -> int:
    return _num_threads


@contextmanager
def parallelism(count: int) -> Iterator[None]:
    """Temporarily run convolutions on `count` threads."""
    previous = get_num_threads()
    set_num_threads(count)
    try:
        yield
    finally:
        set_num_threads(previous)


def _check_weights(weights: np.ndarray, bias: np.ndarray, params: ConvParams) -> None:
    expected = params.weight_shape
    if weights.ndim != 4:
        raise ShapeError(f"Convolution weights must be rank 4, got rank {weights.ndim}",
                         axis="rank", expected=4, actual=weights.ndim)
    for axis, want, got in zip(_WEIGHT_AXES, expected, weights.shape):
        if want != got:
            raise ShapeError(f"Weight {axis} is {got}, expected {want}",
                             axis=axis, expected=want, actual=got)
    if bias.shape != (params.out_channels,):
        raise ShapeError(f"Bias length is {bias.size}, expected {params.out_channels}",
                         axis="bias", expected=params.out_channels, actual=bias.size)


def _pads(params: ConvParams, height: int, width: int):
    kh, kw = params.kernel
    if params.padding == Padding.SAME:
        return same_padding(height, kh, params.stride), same_padding(width, kw, params.stride)
    return (0, 0), (0, 0)


def _conv_rows(padded: np.ndarray, weights: np.ndarray, params: ConvParams,
               rows: Sequence[int], out_width: int) -> np.ndarray:
    """Compute output rows [rows[0], rows[-1]] of a convolution."""
    kh, kw = params.kernel
    s = params.stride
    r0, r1 = rows[0], rows[-1] + 1
    batch = padded.shape[0]
    acc = np.zeros((batch, r1 - r0, out_width, params.out_channels), dtype=np.float64)

    # fixed summation order: taps, then input channels
    for i in range(kh):
        for j in range(kw):
            window = padded[:, r0 * s + i:(r1 - 1) * s + i + 1:s, j:(out_width - 1) * s + j + 1:s, :]
            if params.kind == ConvKind.DEPTHWISE:
                acc += window * weights[i, j, :, 0]
            else:
                tap = weights[i, j]
                for c in range(params.in_channels):
                    acc += window[..., c:c + 1] * tap[c]
    return acc


def conv2d(input: Tensor, weights: np.ndarray, bias: np.ndarray, params: ConvParams) -> Tensor:
    """
    Full, depthwise or pointwise 2D convolution plus bias.

    Args:
        input: NHWC input tensor
        weights: kh x kw x in x out (depthwise: kh x kw x in x 1)
        bias: vector of out_channels
        params: convolution description

    Returns:
        Output tensor with spatial size ceil(in/stride) (same) or
        floor((in-k)/stride)+1 (valid)
    """
    weights = np.asarray(weights)
    bias = np.asarray(bias)
    if input.channels != params.in_channels:
        raise ShapeError(f"Input has {input.channels} channels, expected {params.in_channels}",
                         axis="channels", expected=params.in_channels, actual=input.channels)
    _check_weights(weights, bias, params)

    kh, kw = params.kernel
    out_h = output_size(input.height, kh, params.stride, params.padding)
    out_w = output_size(input.width, kw, params.stride, params.padding)
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"Window {kh}x{kw} does not fit a {input.height}x{input.width} input",
                         axis="height" if out_h < 1 else "width", expected=">= 1",
                         actual=(out_h, out_w))

    (pt, pb), (pl, pr) = _pads(params, input.height, input.width)
    padded = np.pad(input.data.astype(np.float64), ((0, 0), (pt, pb), (pl, pr), (0, 0)))
    weights64 = weights.astype(np.float64)

    threads = min(get_num_threads(), out_h)
    if threads > 1:
        chunks = [c for c in np.array_split(np.arange(out_h), threads) if c.size]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda rows: _conv_rows(padded, weights64, params, rows, out_w), chunks))
        acc = np.concatenate(parts, axis=1)
    else:
        acc = _conv_rows(padded, weights64, params, range(out_h), out_w)

    acc += bias.astype(np.float64)
    return Tensor(acc.astype(np.float32))


def relu(input: Tensor) -> Tensor:
    """Elementwise max(0, x)."""
    return Tensor(np.maximum(input.data, np.float32(0.0)))


def max_pool2d(input: Tensor, window: int, stride: int) -> Tensor:
    """Per-channel max over each window, same-padding spatial rule."""
    if window < 1 or stride < 1:
        raise ShapeError(f"Pool window and stride must be >= 1, got {window}/{stride}",
                         axis="window", expected=">= 1", actual=(window, stride))
    out_h = output_size(input.height, window, stride, Padding.SAME)
    out_w = output_size(input.width, window, stride, Padding.SAME)
    (pt, pb) = same_padding(input.height, window, stride)
    (pl, pr) = same_padding(input.width, window, stride)
    padded = np.pad(input.data, ((0, 0), (pt, pb), (pl, pr), (0, 0)), constant_values=-np.inf)

    result = np.full((input.batch, out_h, out_w, input.channels), -np.inf, dtype=np.float32)
    for i in range(window):
        for j in range(window):
            np.maximum(result, padded[:, i:i + (out_h - 1) * stride + 1:stride,
                                      j:j + (out_w - 1) * stride + 1:stride, :], out=result)
    return Tensor(result)


def pad_channels(input: Tensor, new_channels: int) -> Tensor:
    """Append zero-filled channels up to `new_channels`."""
    if new_channels < input.channels:
        raise ShapeError(f"Cannot pad {input.channels} channels down to {new_channels}",
                         axis="channels", expected=f">= {input.channels}", actual=new_channels)
    if new_channels == input.channels:
        return input
    extra = new_channels - input.channels
    return Tensor(np.pad(input.data, ((0, 0), (0, 0), (0, 0), (0, extra))))


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise sum of two tensors with identical dims."""
    for axis, da, db in zip(AXES, a.dims, b.dims):
        if da != db:
            raise ShapeError(f"Cannot add tensors: {axis} is {da} vs {db}",
                             axis=axis, expected=da, actual=db)
    return Tensor(a.data + b.data)
