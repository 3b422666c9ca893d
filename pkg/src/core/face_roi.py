"""Roll estimation and rotated, scale-normalized face crops for downstream models."""

import math
from typing import Sequence, Tuple

import numpy as np

from config.settings import ROI_SCALE, ROI_SIZE
from src.core.metrics import inter_ocular_distance
from src.models.detection import Detection, FaceRoi, Keypoints
from src.models.tensor import Tensor
from src.utils.image_ops import sample_bilinear
from src.utils.logger import get_logger

logger = get_logger(__name__)


def roll_angle(keypoints: Keypoints) -> float:
    """
    In-plane rotation of a face from its eye centers.

    The first keypoint is the eye on the image left when the face is upright.
    Angles are in radians in (-pi, pi]; 0 means level eyes and a positive
    value a clockwise tilt (y points down).

    Raises:
        DegenerateFaceError: the eye centers coincide
    """
    inter_ocular_distance(keypoints)
    (x0, y0), (x1, y1) = keypoints[0], keypoints[1]
    return math.atan2(y1 - y0, x1 - x0)


def face_roi(detection: Detection, scale: float = ROI_SCALE) -> FaceRoi:
    """
    Square region around a detection, rotated so the eye line is horizontal.

    The side is the longer box side times `scale`; the center is the box center.
    """
    if scale <= 0.0:
        raise ValueError(f"ROI scale must be positive, got {scale}")
    xmin, ymin, xmax, ymax = detection.box
    return FaceRoi(cx=(xmin + xmax) / 2, cy=(ymin + ymax) / 2,
                   size=max(xmax - xmin, ymax - ymin) * scale,
                   angle=roll_angle(detection.keypoints))


def to_roi_coordinates(roi: FaceRoi, points: Sequence[Tuple[float, float]]) -> np.ndarray:
    """Map normalized image points into the region's own [0, 1] frame, shape (N, 2)."""
    offsets = np.asarray(points, dtype=np.float64).reshape(-1, 2) - [roi.cx, roi.cy]
    return offsets @ roi.rotation / roi.size + 0.5


def extract_roi(image: Tensor, roi: FaceRoi, size: int = ROI_SIZE) -> Tensor:
    """
    Resample the rotated region into an upright 1 x size x size x C crop.

    Pixel centers are sampled bilinearly; parts of the region outside the
    image replicate its edge.
    """
    if image.batch != 1:
        raise ValueError(f"extract_roi takes a single image, got batch {image.batch}")

    centers = (np.arange(size, dtype=np.float64) + 0.5) / size - 0.5
    u, v = np.meshgrid(centers * roi.size, centers * roi.size)
    rot = roi.rotation
    x = roi.cx + rot[0, 0] * u + rot[0, 1] * v
    y = roi.cy + rot[1, 0] * u + rot[1, 1] * v

    crop = sample_bilinear(image.data[0], x * image.width - 0.5, y * image.height - 0.5)
    logger.debug(f"Extracted {size}x{size} crop at ({roi.cx:.3f}, {roi.cy:.3f}), "
                 f"roll {math.degrees(roi.angle):.1f} deg")
    return Tensor(crop[None].astype(np.float32))
