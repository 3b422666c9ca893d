"""Data models for anchors, detections, face regions, ground truth and tie policies."""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from config.settings import DEFAULT_CLUSTER_IOU, NUM_KEYPOINTS
from src.models.errors import ConfigError

Box = Tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
Keypoints = Tuple[Tuple[float, float], ...]


def _check_box(box: Box, owner: str) -> None:
    if len(box) != 4:
        raise ValueError(f"{owner}: box needs 4 coordinates, got {len(box)}")
    xmin, ymin, xmax, ymax = box
    if xmin > xmax or ymin > ymax:
        raise ValueError(f"{owner}: invalid box {box}")


def _check_keypoints(keypoints: Keypoints, owner: str) -> None:
    if len(keypoints) != NUM_KEYPOINTS:
        raise ValueError(f"{owner}: expected {NUM_KEYPOINTS} keypoints, got {len(keypoints)}")


@dataclass(frozen=True)
class Anchor:
    """Static prior box, normalized to the input image."""
    cx: float
    cy: float
    w: float
    h: float
    grid: int = 0
    row: int = 0
    col: int = 0


@dataclass(frozen=True)
class Detection:
    """Decoded face: box, 6 keypoints (eyes, nose, mouth, ear tragions) and score.

    `anchor_index` is the row of the anchor that produced it and breaks score ties.
    """
    box: Box
    keypoints: Keypoints
    score: float
    anchor_index: int = 0

    def __post_init__(self):
        _check_box(self.box, "Detection")
        _check_keypoints(self.keypoints, "Detection")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"Detection score {self.score} outside [0, 1]")

    @property
    def coordinates(self) -> np.ndarray:
        """Box followed by flattened keypoints: 16 values."""
        return np.concatenate([np.asarray(self.box, dtype=np.float64),
                               np.asarray(self.keypoints, dtype=np.float64).reshape(-1)])

    @classmethod
    def from_coordinates(cls, coords, score: float, anchor_index: int = 0) -> "Detection":
        coords = [float(v) for v in coords]
        keypoints = tuple((coords[4 + 2 * i], coords[5 + 2 * i]) for i in range(NUM_KEYPOINTS))
        return cls(box=tuple(coords[:4]), keypoints=keypoints, score=float(score),
                   anchor_index=anchor_index)

    @property
    def area(self) -> float:
        xmin, ymin, xmax, ymax = self.box
        return (xmax - xmin) * (ymax - ymin)


@dataclass(frozen=True)
class FaceRoi:
    """Square face region rotated by `angle` radians about its center.

    Normalized image units, y pointing down. The region's x axis runs along
    the eye line, so a positive angle is a clockwise tilt on screen.
    """
    cx: float
    cy: float
    size: float
    angle: float

    def __post_init__(self):
        if not self.size > 0.0:
            raise ValueError(f"FaceRoi size must be positive, got {self.size}")

    @property
    def rotation(self) -> np.ndarray:
        c, s = np.cos(self.angle), np.sin(self.angle)
        return np.array([[c, -s], [s, c]])

    def corners(self) -> np.ndarray:
        """Image positions of the top-left, top-right, bottom-right and bottom-left corners, shape (4, 2)."""
        unit = np.array([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]) * self.size
        return unit @ self.rotation.T + [self.cx, self.cy]


@dataclass(frozen=True)
class Face:
    """One annotated face: box and 6 keypoints, normalized."""
    box: Box
    keypoints: Keypoints

    def __post_init__(self):
        _check_box(self.box, "Face")
        _check_keypoints(self.keypoints, "Face")

    @property
    def area(self) -> float:
        xmin, ymin, xmax, ymax = self.box
        return (xmax - xmin) * (ymax - ymin)


@dataclass(frozen=True)
class GroundTruth:
    """Annotated faces of one image."""
    image_id: str
    faces: Tuple[Face, ...] = ()


class TieMode(str, Enum):
    SUPPRESSION = "suppression"
    BLENDING = "blending"


@dataclass(frozen=True)
class TiePolicy:
    """How overlapping detections are resolved."""
    mode: TieMode = TieMode.BLENDING
    iou_threshold: float = DEFAULT_CLUSTER_IOU

    def __post_init__(self):
        if not 0.0 < self.iou_threshold <= 1.0:
            raise ConfigError(f"Cluster IoU threshold must be in (0, 1], got {self.iou_threshold}")
