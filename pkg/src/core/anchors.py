"""Static anchor generation and decoding of raw head outputs."""

from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from config.settings import ANCHOR_SIZE, DEFAULT_MIN_SCORE, LOGIT_CLAMP, NUM_KEYPOINTS, REGRESSION_SCALE
from src.models.detection import Anchor, Detection
from src.models.errors import ShapeError
from src.models.network import NetworkSpec, blazeface_frontal_spec
from src.utils.logger import get_logger

logger = get_logger(__name__)


def generate_anchors(spec: Optional[NetworkSpec] = None) -> List[Anchor]:
    """
    One anchor per (cell, slot) for every head, in predict_raw row order.

    Centers sit on cell centers ((col + 0.5) / grid, (row + 0.5) / grid); every
    anchor is square with size ANCHOR_SIZE.
    """
    spec = spec or blazeface_frontal_spec()
    anchors: List[Anchor] = []
    for head in spec.heads:
        grid = spec.feature_size(head.source)
        for row in range(grid):
            for col in range(grid):
                for _ in range(head.anchors_per_cell):
                    anchors.append(Anchor(cx=(col + 0.5) / grid, cy=(row + 0.5) / grid,
                                          w=ANCHOR_SIZE, h=ANCHOR_SIZE, grid=grid, row=row, col=col))
    logger.debug(f"Generated {len(anchors)} anchors")
    return anchors


def anchor_array(anchors: Sequence[Anchor]) -> np.ndarray:
    """(N, 4) array of [cx, cy, w, h]."""
    return np.array([[a.cx, a.cy, a.w, a.h] for a in anchors], dtype=np.float64).reshape(-1, 4)


def anchor_table(anchors: Sequence[Anchor]) -> pd.DataFrame:
    """Anchor table with columns index, grid, row, col, cx, cy, w, h."""
    return pd.DataFrame(
        [
            {"index": i, "grid": a.grid, "row": a.row, "col": a.col,
             "cx": a.cx, "cy": a.cy, "w": a.w, "h": a.h}
            for i, a in enumerate(anchors)
        ],
        columns=["index", "grid", "row", "col", "cx", "cy", "w", "h"],
    )


def sigmoid(logits: np.ndarray) -> np.ndarray:
    clamped = np.clip(np.asarray(logits, dtype=np.float64), -LOGIT_CLAMP, LOGIT_CLAMP)
    return 1.0 / (1.0 + np.exp(-clamped))


def decode_coordinates(regressors: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """
    Decode (N, 16) regressors into (N, 16) [xmin, ymin, xmax, ymax, kx1, ky1, ...].

    Offsets are in input pixels divided by REGRESSION_SCALE and scaled by the
    anchor size. No clamping is applied here.
    """
    cx, cy, aw, ah = anchors[:, 0], anchors[:, 1], anchors[:, 2], anchors[:, 3]
    reg = np.asarray(regressors, dtype=np.float64) / REGRESSION_SCALE

    x_center = cx + reg[:, 0] * aw
    y_center = cy + reg[:, 1] * ah
    w = np.maximum(reg[:, 2] * aw, 0.0)
    h = np.maximum(reg[:, 3] * ah, 0.0)

    out = np.empty((reg.shape[0], 4 + 2 * NUM_KEYPOINTS), dtype=np.float64)
    out[:, 0] = x_center - w / 2
    out[:, 1] = y_center - h / 2
    out[:, 2] = x_center + w / 2
    out[:, 3] = y_center + h / 2
    out[:, 4::2] = cx[:, None] + reg[:, 4::2] * aw[:, None]
    out[:, 5::2] = cy[:, None] + reg[:, 5::2] * ah[:, None]
    return out


def decode(scores: np.ndarray, regressors: np.ndarray, anchors: Sequence[Anchor],
           min_score: float = DEFAULT_MIN_SCORE) -> List[Detection]:
    """
    Turn raw logits and regressors into detections above `min_score`.

    Args:
        scores: (N,) raw logits
        regressors: (N, 16) offsets
        anchors: N anchors in row order
        min_score: detections scoring below this are dropped

    Returns:
        Detections in anchor order with boxes and keypoints clamped to [0, 1]
    """
    scores = np.asarray(scores).reshape(-1)
    regressors = np.asarray(regressors)
    if regressors.ndim != 2 or regressors.shape[1] != 4 + 2 * NUM_KEYPOINTS:
        raise ShapeError(f"Regressors must be N x {4 + 2 * NUM_KEYPOINTS}, got {regressors.shape}",
                         axis="regressors", expected=4 + 2 * NUM_KEYPOINTS, actual=regressors.shape)
    if not (scores.shape[0] == regressors.shape[0] == len(anchors)):
        raise ShapeError(f"Length mismatch: {scores.shape[0]} scores, {regressors.shape[0]} regressor rows, "
                         f"{len(anchors)} anchors",
                         axis="anchors", expected=len(anchors), actual=(scores.shape[0], regressors.shape[0]))

    probabilities = sigmoid(scores)
    keep = np.flatnonzero(probabilities >= min_score)
    if keep.size == 0:
        return []

    coords = decode_coordinates(regressors[keep], anchor_array(anchors)[keep])
    np.clip(coords, 0.0, 1.0, out=coords)
    return [
        Detection.from_coordinates(coords[i], score=float(probabilities[index]), anchor_index=int(index))
        for i, index in enumerate(keep)
    ]
