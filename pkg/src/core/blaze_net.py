"""BlazeBlocks, the frontal feature extractor and the 1x1 prediction heads."""

from typing import List, Optional, Tuple

import numpy as np

from config.settings import INPUT_CHANNELS, INPUT_SIZE
from src.core import tensor_ops
from src.models.errors import ShapeError
from src.models.network import BlockKind, BlockSpec, FeatureMap, NetworkSpec, blazeface_frontal_spec, expand_block
from src.models.tensor import ConvParams, Tensor
from src.models.weights import WeightStore
from src.utils.logger import get_logger

logger = get_logger(__name__)

# (stage name, output dims) recorded by extract_features
ShapeTrace = List[Tuple[str, Tuple[int, int, int, int]]]

_FRONTAL_SPEC = blazeface_frontal_spec()


def _apply(input: Tensor, weights: WeightStore, name: str, params: ConvParams) -> Tensor:
    return tensor_ops.conv2d(input, weights.get(f"{name}/kernel"), weights.get(f"{name}/bias"), params)


def _check_block_input(input: Tensor, spec: BlockSpec) -> None:
    if input.channels != spec.in_channels:
        raise ShapeError(f"Block {spec.name} expects {spec.in_channels} channels, got {input.channels}",
                         axis="channels", expected=spec.in_channels, actual=input.channels)


def residual(input: Tensor, spec: BlockSpec) -> Tensor:
    """Identity, or max-pool by the stride then zero channel padding."""
    shortcut = input
    if spec.stride > 1:
        shortcut = tensor_ops.max_pool2d(shortcut, window=spec.stride, stride=spec.stride)
    if spec.out_channels != spec.in_channels:
        shortcut = tensor_ops.pad_channels(shortcut, spec.out_channels)
    return shortcut


def single_blaze_block(input: Tensor, weights: WeightStore, spec: BlockSpec) -> Tensor:
    """Depthwise 5x5 -> pointwise -> residual add -> ReLU."""
    _check_block_input(input, spec)
    (dw_name, dw), (pw_name, pw) = expand_block(spec)
    x = _apply(input, weights, dw_name, dw)
    x = _apply(x, weights, pw_name, pw)
    return tensor_ops.relu(tensor_ops.add(x, residual(input, spec)))


def double_blaze_block(input: Tensor, weights: WeightStore, spec: BlockSpec) -> Tensor:
    """Depthwise -> project to mid channels -> ReLU -> depthwise -> expand -> residual add -> ReLU."""
    _check_block_input(input, spec)
    (dw1_name, dw1), (pw1_name, pw1), (dw2_name, dw2), (pw2_name, pw2) = expand_block(spec)
    x = _apply(input, weights, dw1_name, dw1)
    x = tensor_ops.relu(_apply(x, weights, pw1_name, pw1))
    x = _apply(x, weights, dw2_name, dw2)
    x = _apply(x, weights, pw2_name, pw2)
    return tensor_ops.relu(tensor_ops.add(x, residual(input, spec)))


def run_block(input: Tensor, weights: WeightStore, spec: BlockSpec) -> Tensor:
    """Dispatch one ladder entry by kind."""
    if spec.kind == BlockKind.CONV:
        (name, params), = expand_block(spec)
        return tensor_ops.relu(_apply(input, weights, name, params))
    if spec.kind == BlockKind.SINGLE_BLAZE:
        return single_blaze_block(input, weights, spec)
    return double_blaze_block(input, weights, spec)


def extract_features(input: Tensor, weights: WeightStore,
                     spec: Optional[NetworkSpec] = None,
                     trace: Optional[ShapeTrace] = None) -> Tuple[Tensor, Tensor]:
    """
    Run the feature extractor.

    Args:
        input: 1 x 128 x 128 x 3 image tensor
        weights: weight store holding every extractor layer
        spec: network description (frontal model by default)
        trace: optional list receiving (block name, output dims) per block

    Returns:
        (map16, map8): 1x16x16x96 and 1x8x8x96 feature maps
    """
    spec = spec or _FRONTAL_SPEC
    expected = (1, spec.input_size, spec.input_size, spec.input_channels)
    if input.dims != expected:
        axis = next(a for a, e, d in zip(("batch", "height", "width", "channels"), expected, input.dims) if e != d)
        raise ShapeError(f"Input must be {'x'.join(map(str, expected))}, got {'x'.join(map(str, input.dims))}",
                         axis=axis, expected=expected, actual=input.dims)

    taps = spec.feature_taps()
    outputs = {}
    x = input
    for index, block in enumerate(spec.blocks):
        x = run_block(x, weights, block)
        logger.debug(f"{block.name}: {x.dims}")
        if trace is not None:
            trace.append((block.name, x.dims))
        outputs[index] = x
    try:
        return outputs[taps[FeatureMap.MAP16]], outputs[taps[FeatureMap.MAP8]]
    except KeyError:
        raise ShapeError("Network does not produce both 16x16 and 8x8 feature maps",
                         axis="feature_map", expected=("map16", "map8"), actual=tuple(taps)) from None


def predict_raw(map16: Tensor, map8: Tensor, weights: WeightStore,
                spec: Optional[NetworkSpec] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Apply the 1x1 heads and flatten to one row per anchor.

    Rows are map16 cells in row-major order with anchors innermost, then map8
    likewise. Each head channel block is [score, dx, dy, dw, dh, kx1, ky1, ...].

    Returns:
        (scores, regressors): raw logits of shape (N,) and regressors of shape (N, 16)
    """
    spec = spec or _FRONTAL_SPEC
    maps = {FeatureMap.MAP16: map16, FeatureMap.MAP8: map8}
    head_layers = {layer.name: layer for layer in spec.layers() if layer.block_kind == BlockKind.HEAD}

    rows = []
    for head in spec.heads:
        feature = maps[head.source]
        size = spec.feature_size(head.source)
        expected = (1, size, size, spec.feature_channels(head.source))
        if feature.dims != expected:
            raise ShapeError(f"{head.source.value} must be {'x'.join(map(str, expected))}, "
                             f"got {'x'.join(map(str, feature.dims))}",
                             axis=head.source.value, expected=expected, actual=feature.dims)
        out = _apply(feature, weights, head.name, head_layers[head.name].params)
        rows.append(out.data.reshape(-1, head.outputs_per_anchor))

    table = np.concatenate(rows, axis=0)
    return table[:, 0].copy(), table[:, 1:].copy()


class BlazeFaceNet:
    """Spec plus weights bundled for repeated inference."""

    def __init__(self, weights: WeightStore, spec: Optional[NetworkSpec] = None):
        self.spec = spec or _FRONTAL_SPEC
        self.weights = weights

    def __call__(self, image: Tensor) -> Tuple[np.ndarray, np.ndarray]:
        map16, map8 = extract_features(image, self.weights, self.spec)
        return predict_raw(map16, map8, self.weights, self.spec)


def blank_input() -> Tensor:
    """All-zero 1x128x128x3 input."""
    return Tensor.zeros(1, INPUT_SIZE, INPUT_SIZE, INPUT_CHANNELS)
