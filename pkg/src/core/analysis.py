"""Analytic cost and receptive-field models, a per-block timing harness and
the tie-resolution and anchor-scheme comparisons."""

import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from config.settings import DEFAULT_RANDOM_SEED, DEFAULT_TIMING_ITERATIONS, NUM_KEYPOINTS
from src.core import tensor_ops
from src.core.blaze_net import predict_raw, run_block
from src.core.postprocess import resolve
from src.models.detection import Detection, TieMode, TiePolicy
from src.models.errors import ConfigError
from src.models.network import BlockKind, FeatureMap, NetworkSpec, blazeface_frontal_spec
from src.models.reports import (
    CostReport,
    LayerCost,
    LayerRF,
    LayerTiming,
    RFReport,
    TieBenchmarkReport,
    TimingReport,
)
from src.models.tensor import ConvKind, ConvParams, Padding, Tensor, same_padding
from src.models.weights import WeightStore
from src.utils.logger import get_logger

logger = get_logger(__name__)


def mac_count(layer: ConvParams, input_shape: Tuple[int, int, int]) -> int:
    """
    Multiply-add count of one convolution on an s x s x c input.

    depthwise: s^2 * c * k^2, pointwise: s^2 * c * d, full: s^2 * c * d * k^2,
    where s is the output spatial size and d the output channels.
    """
    size, _, channels = input_shape
    s = layer.output_size(size)
    kh, kw = layer.kernel
    if layer.kind == ConvKind.DEPTHWISE:
        return s * s * channels * kh * kw
    if layer.kind == ConvKind.POINTWISE:
        return s * s * channels * layer.out_channels
    return s * s * channels * layer.out_channels * kh * kw


def network_cost(spec: NetworkSpec) -> CostReport:
    """MACs of every primitive convolution in the extractor and heads."""
    report = CostReport()
    for layer in spec.layers():
        p = layer.params
        report.layers.append(LayerCost(
            name=layer.name,
            block=layer.block,
            kind=p.kind.value,
            stage="head" if layer.block_kind == BlockKind.HEAD else "extractor",
            input_shape=(layer.in_size, layer.in_size, p.in_channels),
            output_shape=(layer.out_size, layer.out_size, p.out_channels),
            macs=mac_count(p, (layer.in_size, layer.in_size, p.in_channels)),
        ))
    return report


def receptive_field(spec: NetworkSpec) -> RFReport:
    """
    Receptive field and cumulative stride after each extractor convolution.

    rf += (k - 1) * jump and jump *= stride per layer. `start` tracks the first
    input pixel seen by output cell 0, negative inside the padding.
    """
    report = RFReport()
    rf, jump, start = 1, 1, 0.0
    for layer in spec.layers(include_heads=False):
        k = layer.params.kernel[0]
        stride = layer.params.stride
        lead = 0
        if layer.params.padding == Padding.SAME:
            lead, _ = same_padding(layer.in_size, k, stride)
        start -= lead * jump
        rf += (k - 1) * jump
        jump *= stride
        report.layers.append(LayerRF(name=layer.name, kernel=k, stride=stride, out_size=layer.out_size,
                                     rf=rf, jump=jump, start=start))

    for source, block_index in spec.feature_taps().items():
        block_name = spec.blocks[block_index].name
        last = max(i for i, l in enumerate(report.layers) if l.name.split("/")[0] == block_name)
        report.taps[source.value] = last
    return report


def compare_receptive_fields(spec: NetworkSpec, kernel: int = 3) -> pd.DataFrame:
    """Receptive fields and cost of `spec` next to a copy with `kernel` x `kernel` depthwise kernels."""
    baseline_kernel = next((b.kernel_size for b in spec.blocks if b.kind != BlockKind.CONV), kernel)
    rows = []
    for label, variant, k in (("baseline", spec, baseline_kernel),
                              ("variant", spec.with_depthwise_kernel(kernel), kernel)):
        rf = receptive_field(variant)
        cost = network_cost(variant)
        rows.append({
            "network": label,
            "depthwise_kernel": k,
            "rf_map16": rf.rf_at(FeatureMap.MAP16.value) if FeatureMap.MAP16.value in rf.taps else None,
            "rf_map8": rf.rf_at(FeatureMap.MAP8.value) if FeatureMap.MAP8.value in rf.taps else None,
            "final_rf": rf.final_rf,
            "total_macs": cost.total_macs,
            "dispatches": cost.dispatch_count,
        })
    return pd.DataFrame(rows)


def _median_min(samples: Sequence[float]) -> Tuple[float, float]:
    values = np.asarray(samples, dtype=np.float64) * 1000.0
    return float(np.median(values)), float(values.min())


def time_layers(spec: NetworkSpec, weights: WeightStore, input: Tensor,
                iterations: int = DEFAULT_TIMING_ITERATIONS, threads: int = 1,
                show_progress: bool = False) -> TimingReport:
    """
    Wall-clock time of each block, the heads and the whole network.

    One warm-up pass is run first and excluded. Blocks are timed on the
    inputs recorded during warm-up. Each timed whole-network output is
    compared byte for byte with the warm-up output.

    Args:
        spec: network description
        weights: weights for every layer of spec
        input: 1 x 128 x 128 x 3 tensor
        iterations: timed repetitions, at least 1
        threads: convolution worker threads

    Returns:
        TimingReport with per-block and whole-network median/min in ms
    """
    if iterations < 1:
        raise ConfigError(f"Timing needs at least one iteration, got {iterations}")

    taps = spec.feature_taps()

    def forward(x: Tensor, record: Optional[List[Tensor]] = None) -> Tuple[Tensor, Tensor]:
        outputs = []
        for block in spec.blocks:
            if record is not None:
                record.append(x)
            x = run_block(x, weights, block)
            outputs.append(x)
        return outputs[taps[FeatureMap.MAP16]], outputs[taps[FeatureMap.MAP8]]

    with tensor_ops.parallelism(threads):
        block_inputs: List[Tensor] = []
        map16, map8 = forward(input, block_inputs)
        reference = predict_raw(map16, map8, weights, spec)
        identical = True

        samples: Dict[str, List[float]] = {b.name: [] for b in spec.blocks}
        samples["heads"] = []
        network: List[float] = []
        for _ in tqdm(range(iterations), desc="Timing", unit="it", disable=not show_progress):
            for block, block_input in zip(spec.blocks, block_inputs):
                t0 = time.perf_counter()
                run_block(block_input, weights, block)
                samples[block.name].append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            predict_raw(map16, map8, weights, spec)
            samples["heads"].append(time.perf_counter() - t0)

            t0 = time.perf_counter()
            scores, regressors = predict_raw(*forward(input), weights, spec)
            network.append(time.perf_counter() - t0)
            identical = (identical and scores.tobytes() == reference[0].tobytes()
                         and regressors.tobytes() == reference[1].tobytes())

    report = TimingReport(iterations=iterations, threads=threads, outputs_identical=identical)
    if not identical:
        logger.warning("Network output changed between timing iterations on a constant input")
    for name, values in samples.items():
        median, minimum = _median_min(values)
        report.layers.append(LayerTiming(name=name, median_ms=median, min_ms=minimum))
    report.network_median_ms, report.network_min_ms = _median_min(network)
    logger.info(f"Network median {report.network_median_ms:.2f} ms over {iterations} iterations "
                f"({threads} thread{'s' if threads != 1 else ''})")
    return report


def _noisy_copy(truth: np.ndarray, rng: np.random.Generator, noise: float, index: int) -> Detection:
    coords = np.clip(truth + rng.normal(0.0, noise, size=truth.shape), 0.0, 1.0)
    # keep boxes well-formed after noise
    coords[0], coords[2] = min(coords[0], coords[2]), max(coords[0], coords[2])
    coords[1], coords[3] = min(coords[1], coords[3]), max(coords[1], coords[3])
    return Detection.from_coordinates(coords, score=0.9, anchor_index=index)


def _center(detection: Detection) -> np.ndarray:
    xmin, ymin, xmax, ymax = detection.box
    return np.array([(xmin + xmax) / 2, (ymin + ymax) / 2])


def tie_resolution_benchmark(trials: int = 200, copies: int = 6, frames: int = 10,
                             noise: float = 0.01, seed: int = DEFAULT_RANDOM_SEED,
                             iou_threshold: float = 0.3) -> TieBenchmarkReport:
    """
    Center deviation of blended vs suppressed output on noisy duplicates.

    Each trial places a face box at a random position and, for every frame,
    draws `copies` equal-score detections with iid Gaussian coordinate noise.
    The trial's figure is the RMS over frames of the distance between the
    resolved box center and the true center.

    Returns:
        TieBenchmarkReport with one blended and one suppressed RMS per trial
    """
    if trials < 1 or copies < 1 or frames < 1:
        raise ConfigError("trials, copies and frames must all be >= 1")

    rng = np.random.default_rng(seed)
    blend_policy = TiePolicy(TieMode.BLENDING, iou_threshold)
    suppress_policy = TiePolicy(TieMode.SUPPRESSION, iou_threshold)
    blended = np.empty(trials)
    suppressed = np.empty(trials)
    for trial in range(trials):
        size = rng.uniform(0.2, 0.4)
        cx, cy = rng.uniform(0.3, 0.7, size=2)
        box = [cx - size / 2, cy - size / 2, cx + size / 2, cy + size / 2]
        keypoints = rng.uniform(-0.3, 0.3, size=2 * NUM_KEYPOINTS) * size + np.tile([cx, cy], NUM_KEYPOINTS)
        truth = np.concatenate([box, keypoints])

        blend_sq, suppress_sq = [], []
        for _ in range(frames):
            detections = [_noisy_copy(truth, rng, noise, i) for i in range(copies)]
            for policy, sink in ((blend_policy, blend_sq), (suppress_policy, suppress_sq)):
                top = resolve(detections, policy)[0]
                sink.append(np.sum((_center(top) - [cx, cy]) ** 2))
        blended[trial] = np.sqrt(np.mean(blend_sq))
        suppressed[trial] = np.sqrt(np.mean(suppress_sq))

    report = TieBenchmarkReport(blended_rms=blended, suppressed_rms=suppressed)
    logger.info(f"Blending beats suppression in {report.blend_win_rate:.1%} of {trials} trials, "
                f"median reduction {report.median_reduction:.1%}")
    return report


def anchor_scheme_comparison(spec: Optional[NetworkSpec] = None,
                             pyramid: Sequence[int] = (16, 8, 4, 2, 1),
                             pyramid_anchors_per_cell: int = 2) -> pd.DataFrame:
    """Anchor and head-dispatch counts of the two-grid scheme vs a classic SSD pyramid."""
    spec = spec or blazeface_frontal_spec()
    grids = [spec.feature_size(h.source) for h in spec.heads]
    return pd.DataFrame([
        {
            "scheme": "blazeface",
            "grids": ",".join(str(g) for g in grids),
            "anchors_per_cell": ",".join(str(h.anchors_per_cell) for h in spec.heads),
            "anchors": spec.anchor_count,
            "head_dispatches": len(spec.heads),
        },
        {
            "scheme": "ssd_pyramid",
            "grids": ",".join(str(g) for g in pyramid),
            "anchors_per_cell": ",".join(str(pyramid_anchors_per_cell) for _ in pyramid),
            "anchors": sum(g * g * pyramid_anchors_per_cell for g in pyramid),
            "head_dispatches": len(pyramid),
        },
    ])
