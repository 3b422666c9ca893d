"""Named, immutable collection of network weight arrays."""

from collections import OrderedDict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping, Optional, Tuple

import numpy as np

from config.settings import WEIGHT_FORMAT_VERSION
from src.models.errors import WeightsError
from src.models.network import NetworkSpec


@dataclass(frozen=True)
class WeightStore:
    """Ordered map from ASCII layer name to float32 array.

    Arrays are copied and frozen on construction; insertion order is the
    order tensors are written to disk.
    """
    tensors: Mapping[str, np.ndarray]
    format_version: int = WEIGHT_FORMAT_VERSION
    seed: Optional[int] = None
    _frozen: Mapping[str, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        frozen = OrderedDict()
        for name, array in self.tensors.items():
            if not name or not name.isascii():
                raise WeightsError(f"Tensor name must be non-empty ASCII: {name!r}", layer=name)
            copy = np.array(array, dtype=np.float32, order="C", copy=True)
            copy.setflags(write=False)
            frozen[name] = copy
        object.__setattr__(self, "_frozen", MappingProxyType(frozen))
        object.__setattr__(self, "tensors", self._frozen)

    def __contains__(self, name: str) -> bool:
        return name in self._frozen

    def __len__(self) -> int:
        return len(self._frozen)

    def __iter__(self) -> Iterator[str]:
        return iter(self._frozen)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightStore):
            return NotImplemented
        if list(self._frozen) != list(other._frozen):
            return False
        return all(
            a.shape == b.shape and a.tobytes() == b.tobytes()
            for a, b in zip(self._frozen.values(), other._frozen.values())
        )

    def items(self):
        return self._frozen.items()

    def names(self) -> Tuple[str, ...]:
        return tuple(self._frozen)

    def get(self, name: str) -> np.ndarray:
        """Return tensor `name`, raising WeightsError naming the layer if absent."""
        try:
            return self._frozen[name]
        except KeyError:
            layer = name.rsplit("/", 1)[0]
            raise WeightsError(f"Missing weights for layer '{layer}' ({name})", layer=layer) from None

    def validate(self, spec: NetworkSpec) -> None:
        """Check names and shapes against the expanded network."""
        expected = spec.weight_shapes()
        for name, shape in expected.items():
            array = self.get(name)
            if tuple(array.shape) != tuple(shape):
                raise WeightsError(
                    f"Tensor {name} has shape {tuple(array.shape)}, expected {tuple(shape)}",
                    layer=name.rsplit("/", 1)[0],
                )
        extra = sorted(set(self._frozen) - set(expected))
        if extra:
            raise WeightsError(f"Unexpected tensors in weight store: {', '.join(extra)}",
                               layer=extra[0].rsplit("/", 1)[0])


def init_random_weights(spec: NetworkSpec, seed: int) -> WeightStore:
    """
    Glorot-uniform kernels and zero biases for every layer of `spec`.

    Args:
        spec: network description
        seed: random seed; the same seed always yields the same store

    Returns:
        WeightStore with `seed` recorded
    """
    rng = np.random.default_rng(seed)
    tensors = OrderedDict()
    for layer in spec.layers():
        kh, kw, cin, cout = layer.params.weight_shape
        fan_in = kh * kw * cin
        fan_out = kh * kw * cout
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        tensors[layer.weight_name] = rng.uniform(-bound, bound, size=(kh, kw, cin, cout)).astype(np.float32)
        tensors[layer.bias_name] = np.zeros(layer.params.out_channels, dtype=np.float32)
    return WeightStore(tensors, seed=seed)
