"""Result containers for analysis and evaluation runs."""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class LayerCost:
    name: str
    block: str
    kind: str
    stage: str  # "extractor" or "head"
    input_shape: Tuple[int, int, int]
    output_shape: Tuple[int, int, int]
    macs: int


@dataclass
class CostReport:
    """Multiply-add counts per primitive convolution."""
    layers: List[LayerCost] = field(default_factory=list)

    @property
    def total_macs(self) -> int:
        return sum(layer.macs for layer in self.layers)

    @property
    def dispatch_count(self) -> int:
        return len(self.layers)

    @property
    def extractor_dispatch_count(self) -> int:
        return sum(1 for layer in self.layers if layer.stage == "extractor")

    def macs_by_kind(self) -> Dict[str, int]:
        totals: Dict[str, int] = {}
        for layer in self.layers:
            totals[layer.kind] = totals.get(layer.kind, 0) + layer.macs
        return totals

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "layer": l.name,
                    "kind": l.kind,
                    "input": "x".join(map(str, l.input_shape)),
                    "output": "x".join(map(str, l.output_shape)),
                    "macs": l.macs,
                }
                for l in self.layers
            ],
            columns=["layer", "kind", "input", "output", "macs"],
        )


@dataclass(frozen=True)
class LayerRF:
    name: str
    kernel: int
    stride: int
    out_size: int
    rf: int
    jump: int
    start: float  # input coordinate of the first window of output cell 0


@dataclass
class RFReport:
    """Receptive field size and cumulative stride after each primitive layer."""
    layers: List[LayerRF] = field(default_factory=list)
    taps: Dict[str, int] = field(default_factory=dict)  # feature map -> layer index

    @property
    def final_rf(self) -> int:
        return self.layers[-1].rf if self.layers else 1

    def rf_at(self, feature_map: str) -> int:
        return self.layers[self.taps[feature_map]].rf

    def window(self, layer_index: int, row: int, col: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """Inclusive input-pixel ranges ((row0, row1), (col0, col1)) seen by one cell."""
        layer = self.layers[layer_index]
        r0 = int(layer.start + row * layer.jump)
        c0 = int(layer.start + col * layer.jump)
        return (r0, r0 + layer.rf - 1), (c0, c0 + layer.rf - 1)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(l) for l in self.layers],
                            columns=["name", "kernel", "stride", "out_size", "rf", "jump", "start"])


@dataclass(frozen=True)
class LayerTiming:
    name: str
    median_ms: float
    min_ms: float


@dataclass
class TimingReport:
    iterations: int
    threads: int
    layers: List[LayerTiming] = field(default_factory=list)
    network_median_ms: float = 0.0
    network_min_ms: float = 0.0
    # every timed whole-network pass reproduced the warm-up output bit for bit
    outputs_identical: bool = True

    @property
    def layer_median_sum_ms(self) -> float:
        return float(sum(l.median_ms for l in self.layers))

    def to_frame(self) -> pd.DataFrame:
        rows = [asdict(l) for l in self.layers]
        rows.append({"name": "network", "median_ms": self.network_median_ms,
                     "min_ms": self.network_min_ms})
        return pd.DataFrame(rows, columns=["name", "median_ms", "min_ms"])


@dataclass
class TieBenchmarkReport:
    """Per-trial RMS center deviation of blended vs suppressed output."""
    blended_rms: np.ndarray
    suppressed_rms: np.ndarray

    @property
    def trials(self) -> int:
        return int(self.blended_rms.size)

    @property
    def blend_win_rate(self) -> float:
        return float(np.mean(self.blended_rms < self.suppressed_rms))

    @property
    def median_reduction(self) -> float:
        return float(np.median(1.0 - self.blended_rms / self.suppressed_rms))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"blended_rms": self.blended_rms,
                             "suppressed_rms": self.suppressed_rms})


@dataclass(frozen=True)
class JitterResult:
    value: float
    matched: int
    unmatched: int


@dataclass
class ImageMatches:
    """Greedy matching outcome for one image."""
    image_id: str
    # (prediction index, truth index, iou) for each true positive
    pairs: List[Tuple[int, int, float]] = field(default_factory=list)
    false_positives: List[int] = field(default_factory=list)
    missed: List[int] = field(default_factory=list)


@dataclass
class EvalReport:
    """Dataset-level evaluation result."""
    average_precision: float
    median_abs_regression_error_iod: Optional[float]
    jitter_iod: Optional[float]
    matches: List[ImageMatches] = field(default_factory=list)
    ap_convention: Optional[str] = None
    stats: Dict[str, Any] = field(default_factory=dict)

    def as_key_values(self) -> Dict[str, str]:
        def fmt(value: Optional[float]) -> str:
            return "nan" if value is None else f"{value:.6f}"

        values = {
            "average_precision": fmt(self.average_precision),
            "median_abs_regression_error_iod": fmt(self.median_abs_regression_error_iod),
            "jitter_iod": fmt(self.jitter_iod),
            "images": str(len(self.matches)),
            "true_positives": str(sum(len(m.pairs) for m in self.matches)),
            "false_positives": str(sum(len(m.false_positives) for m in self.matches)),
            "missed": str(sum(len(m.missed) for m in self.matches)),
        }
        if self.ap_convention:
            values["ap_convention"] = self.ap_convention
        return values

    def to_text(self) -> str:
        lines = [
            "Evaluation report",
            "-" * 40,
            f"Average precision (IoU 0.5): {self.average_precision:.4f}",
        ]
        if self.ap_convention:
            lines.append(f"  note: {self.ap_convention}")
        if self.median_abs_regression_error_iod is None:
            lines.append("Median abs. regression error: n/a (no matched faces)")
        else:
            lines.append(f"Median abs. regression error: {self.median_abs_regression_error_iod:.2%} of IOD")
        if self.jitter_iod is None:
            lines.append("Jitter metric: n/a")
        else:
            lines.append(f"Jitter metric: {self.jitter_iod:.2%} of IOD")
        for m in self.matches:
            lines.append(f"  {m.image_id}: tp={len(m.pairs)} fp={len(m.false_positives)} missed={len(m.missed)}")
        lines.append("")
        lines.extend(f"{k}={v}" for k, v in self.as_key_values().items())
        return "\n".join(lines)
