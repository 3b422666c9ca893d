"""Tie resolution between overlapping detections: blending and classic suppression."""

from typing import List, Sequence

import numpy as np

from src.models.detection import Box, Detection, TieMode, TiePolicy
from src.utils.logger import get_logger

logger = get_logger(__name__)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two (xmin, ymin, xmax, ymax) boxes; 0 when the union is empty."""
    iw = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
    ih = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    if union <= 0.0:
        return 0.0
    return float(inter / union)


def iou_matrix(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
    """Pairwise IoU between (N, 4) and (M, 4) box arrays."""
    a = np.asarray(boxes_a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(boxes_b, dtype=np.float64).reshape(-1, 4)
    iw = np.clip(np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0]), 0.0, None)
    ih = np.clip(np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1]), 0.0, None)
    inter = iw * ih
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        result = np.where(union > 0.0, inter / union, 0.0)
    return result


def score_order(detections: Sequence[Detection]) -> List[int]:
    """Indices by descending score, ties broken by lower anchor index."""
    return sorted(range(len(detections)),
                  key=lambda i: (-detections[i].score, detections[i].anchor_index))


def _blend(cluster: Sequence[Detection], top: Detection) -> Detection:
    coords = np.stack([d.coordinates for d in cluster])
    weights = np.array([d.score for d in cluster], dtype=np.float64)
    if weights.sum() <= 0.0:
        weights = np.ones_like(weights)
    blended = weights @ coords / weights.sum()
    # keep the mean inside the members' per-coordinate hull despite rounding
    blended = np.clip(blended, coords.min(axis=0), coords.max(axis=0))
    return Detection.from_coordinates(blended, score=top.score, anchor_index=top.anchor_index)


def resolve(detections: Sequence[Detection], policy: TiePolicy = TiePolicy()) -> List[Detection]:
    """
    Greedy clustering around the highest-scoring remaining detection.

    Each cluster is the top detection plus every remaining detection with
    IoU >= policy.iou_threshold against it. Suppression emits the top detection;
    blending emits the score-weighted mean of box and keypoint coordinates with
    the cluster's maximum score.

    Returns:
        One detection per cluster, sorted by score descending
    """
    if not detections:
        return []

    order = score_order(detections)
    ordered = [detections[i] for i in order]
    boxes = np.array([d.box for d in ordered], dtype=np.float64)
    overlaps = iou_matrix(boxes, boxes)

    remaining = np.ones(len(ordered), dtype=bool)
    output: List[Detection] = []
    for top_index in range(len(ordered)):
        if not remaining[top_index]:
            continue
        members = remaining & (overlaps[top_index] >= policy.iou_threshold)
        members[top_index] = True
        cluster = [ordered[i] for i in np.flatnonzero(members)]
        remaining &= ~members

        top = ordered[top_index]
        if policy.mode == TieMode.BLENDING and len(cluster) > 1:
            output.append(_blend(cluster, top))
        else:
            output.append(top)

    logger.debug(f"Resolved {len(detections)} detections into {len(output)} ({policy.mode.value})")
    return [output[i] for i in score_order(output)]
