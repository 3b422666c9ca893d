"""Declarative network description shared by inference, weight init and analysis."""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

from config.settings import (
    ANCHORS_MAP16,
    ANCHORS_MAP8,
    DEPTHWISE_KERNEL,
    DOUBLE_BLOCK_MID_CHANNELS,
    INPUT_CHANNELS,
    INPUT_SIZE,
    OUTPUTS_PER_ANCHOR,
)
from src.models.errors import ShapeError
from src.models.tensor import ConvKind, ConvParams, Padding, output_size


class BlockKind(str, Enum):
    SINGLE_BLAZE = "single_blaze"
    DOUBLE_BLAZE = "double_blaze"
    CONV = "conv"
    HEAD = "head"


class FeatureMap(str, Enum):
    MAP16 = "map16"
    MAP8 = "map8"


@dataclass(frozen=True)
class BlockSpec:
    """One entry of the feature-extractor ladder."""
    name: str
    kind: BlockKind
    stride: int
    in_channels: int
    out_channels: int
    mid_channels: int = DOUBLE_BLOCK_MID_CHANNELS
    kernel_size: int = DEPTHWISE_KERNEL

    def __post_init__(self):
        if self.stride not in (1, 2):
            raise ShapeError(f"Block {self.name}: stride must be 1 or 2, got {self.stride}",
                             axis="stride", expected=(1, 2), actual=self.stride)
        if self.kind == BlockKind.HEAD:
            raise ShapeError(f"Block {self.name}: heads are described by HeadSpec",
                             axis="kind", expected="extractor block", actual=self.kind.value)


@dataclass(frozen=True)
class HeadSpec:
    """A 1x1 prediction head attached to one feature map."""
    source: FeatureMap
    anchors_per_cell: int
    outputs_per_anchor: int = OUTPUTS_PER_ANCHOR

    @property
    def name(self) -> str:
        return f"head_{self.source.value}"

    @property
    def out_channels(self) -> int:
        return self.anchors_per_cell * self.outputs_per_anchor


@dataclass(frozen=True)
class LayerSpec:
    """One primitive convolution of the expanded network."""
    name: str
    params: ConvParams
    block: str
    block_kind: BlockKind
    in_size: int
    out_size: int

    @property
    def weight_name(self) -> str:
        return f"{self.name}/kernel"

    @property
    def bias_name(self) -> str:
        return f"{self.name}/bias"


def _conv(kind: ConvKind, k: int, stride: int, cin: int, cout: int) -> ConvParams:
    return ConvParams(kernel=(k, k), stride=stride, padding=Padding.SAME, kind=kind,
                      in_channels=cin, out_channels=cout)


def expand_block(block: BlockSpec) -> List[Tuple[str, ConvParams]]:
    """Primitive convolutions of a block, in execution order."""
    k = block.kernel_size
    if block.kind == BlockKind.CONV:
        return [(block.name, _conv(ConvKind.FULL, k, block.stride, block.in_channels, block.out_channels))]
    if block.kind == BlockKind.SINGLE_BLAZE:
        return [
            (f"{block.name}/dw1", _conv(ConvKind.DEPTHWISE, k, block.stride, block.in_channels, block.in_channels)),
            (f"{block.name}/pw1", _conv(ConvKind.POINTWISE, 1, 1, block.in_channels, block.out_channels)),
        ]
    mid = block.mid_channels
    return [
        (f"{block.name}/dw1", _conv(ConvKind.DEPTHWISE, k, block.stride, block.in_channels, block.in_channels)),
        (f"{block.name}/pw1", _conv(ConvKind.POINTWISE, 1, 1, block.in_channels, mid)),
        (f"{block.name}/dw2", _conv(ConvKind.DEPTHWISE, k, 1, mid, mid)),
        (f"{block.name}/pw2", _conv(ConvKind.POINTWISE, 1, 1, mid, block.out_channels)),
    ]


@dataclass(frozen=True)
class NetworkSpec:
    """Input geometry, block ladder and heads of a detector."""
    input_size: int = INPUT_SIZE
    input_channels: int = INPUT_CHANNELS
    blocks: Tuple[BlockSpec, ...] = field(default_factory=tuple)
    heads: Tuple[HeadSpec, ...] = field(default_factory=tuple)

    def block_sizes(self) -> List[Tuple[int, int]]:
        """(output spatial size, output channels) after each block."""
        sizes = []
        size = self.input_size
        for block in self.blocks:
            size = output_size(size, block.kernel_size, block.stride, Padding.SAME)
            sizes.append((size, block.out_channels))
        return sizes

    def feature_taps(self) -> Dict[FeatureMap, int]:
        """Index of the block whose output feeds each feature map.

        map16 is the last 16x16 block output, map8 the final output.
        """
        taps: Dict[FeatureMap, int] = {}
        for index, (size, _) in enumerate(self.block_sizes()):
            if size == self.input_size // 8:
                taps[FeatureMap.MAP16] = index
            if size == self.input_size // 16:
                taps[FeatureMap.MAP8] = index
        return taps

    def feature_size(self, source: FeatureMap) -> int:
        return self.input_size // (8 if source == FeatureMap.MAP16 else 16)

    def feature_channels(self, source: FeatureMap) -> int:
        tap = self.feature_taps().get(source)
        if tap is None:
            raise ShapeError(f"Network has no {source.value} feature map",
                             axis="feature_map", expected=source.value, actual=None)
        return self.blocks[tap].out_channels

    @property
    def anchor_count(self) -> int:
        return sum(self.feature_size(h.source) ** 2 * h.anchors_per_cell for h in self.heads)

    def layers(self, include_heads: bool = True) -> List[LayerSpec]:
        """Expand blocks (and heads) into primitive convolutions with spatial sizes."""
        layers: List[LayerSpec] = []
        size = self.input_size
        for block in self.blocks:
            for name, params in expand_block(block):
                out = params.output_size(size)
                layers.append(LayerSpec(name=name, params=params, block=block.name,
                                        block_kind=block.kind, in_size=size, out_size=out))
                size = out
        if include_heads:
            for head in self.heads:
                size = self.feature_size(head.source)
                params = _conv(ConvKind.POINTWISE, 1, 1, self.feature_channels(head.source), head.out_channels)
                layers.append(LayerSpec(name=head.name, params=params, block=head.name,
                                        block_kind=BlockKind.HEAD, in_size=size, out_size=size))
        return layers

    def weight_shapes(self) -> Dict[str, Tuple[int, ...]]:
        """Every weight tensor name mapped to its required shape."""
        shapes: Dict[str, Tuple[int, ...]] = {}
        for layer in self.layers():
            shapes[layer.weight_name] = layer.params.weight_shape
            shapes[layer.bias_name] = (layer.params.out_channels,)
        return shapes

    def with_depthwise_kernel(self, kernel_size: int) -> "NetworkSpec":
        """Copy of this spec with every BlazeBlock depthwise kernel resized."""
        blocks = tuple(
            b if b.kind == BlockKind.CONV else replace(b, kernel_size=kernel_size)
            for b in self.blocks
        )
        return replace(self, blocks=blocks)


def blazeface_frontal_spec(heads: Optional[Tuple[HeadSpec, ...]] = None) -> NetworkSpec:
    """Frontal-camera feature extractor: 1 conv, 5 single and 6 double BlazeBlocks."""
    ladder = [
        BlockSpec("conv0", BlockKind.CONV, 2, INPUT_CHANNELS, 24),
        BlockSpec("block01", BlockKind.SINGLE_BLAZE, 1, 24, 24),
        BlockSpec("block02", BlockKind.SINGLE_BLAZE, 1, 24, 24),
        BlockSpec("block03", BlockKind.SINGLE_BLAZE, 2, 24, 48),
        BlockSpec("block04", BlockKind.SINGLE_BLAZE, 1, 48, 48),
        BlockSpec("block05", BlockKind.SINGLE_BLAZE, 1, 48, 48),
        BlockSpec("block06", BlockKind.DOUBLE_BLAZE, 2, 48, 96),
        BlockSpec("block07", BlockKind.DOUBLE_BLAZE, 1, 96, 96),
        BlockSpec("block08", BlockKind.DOUBLE_BLAZE, 1, 96, 96),
        BlockSpec("block09", BlockKind.DOUBLE_BLAZE, 2, 96, 96),
        BlockSpec("block10", BlockKind.DOUBLE_BLAZE, 1, 96, 96),
        BlockSpec("block11", BlockKind.DOUBLE_BLAZE, 1, 96, 96),
    ]
    if heads is None:
        heads = (
            HeadSpec(FeatureMap.MAP16, ANCHORS_MAP16),
            HeadSpec(FeatureMap.MAP8, ANCHORS_MAP8),
        )
    return NetworkSpec(input_size=INPUT_SIZE, input_channels=INPUT_CHANNELS,
                       blocks=tuple(ladder), heads=tuple(heads))
