"""End-to-end face detection: features, heads, anchor decoding, tie resolution."""

from typing import List, Optional

from src.core.anchors import decode, generate_anchors
from src.core.blaze_net import BlazeFaceNet
from src.core.postprocess import resolve
from src.models.detection import Detection
from src.models.detector_config import DetectorConfig
from src.models.network import NetworkSpec, blazeface_frontal_spec
from src.models.tensor import Tensor
from src.models.weights import WeightStore
from src.utils.logger import get_logger

logger = get_logger(__name__)


class FaceDetector:
    """Weights, network and configuration bundled for repeated detection.

    Holds no mutable state after construction, so one instance can serve
    several threads.
    """

    def __init__(self, weights: WeightStore, config: Optional[DetectorConfig] = None,
                 spec: Optional[NetworkSpec] = None):
        self.config = config or DetectorConfig()
        self.spec = spec or blazeface_frontal_spec()
        weights.validate(self.spec)
        self.net = BlazeFaceNet(weights, self.spec)
        self.anchors = generate_anchors(self.spec)

    def detect(self, image: Tensor) -> List[Detection]:
        """
        Detect faces in one 1 x 128 x 128 x 3 image.

        Returns:
            Resolved detections sorted by score descending
        """
        scores, regressors = self.net(image)
        candidates = decode(scores, regressors, self.anchors, self.config.min_score)
        detections = resolve(candidates, self.config.tie_policy)
        logger.debug(f"{len(candidates)} candidates above {self.config.min_score}, {len(detections)} after resolution")
        return detections

    __call__ = detect


def detect(image: Tensor, weights: WeightStore, config: Optional[DetectorConfig] = None) -> List[Detection]:
    """One-shot detection with the frontal network."""
    return FaceDetector(weights, config).detect(image)


def format_detection(detection: Detection) -> str:
    """score, box and 6 keypoints as space-separated %.6f values."""
    values = [detection.score, *detection.coordinates]
    return " ".join(f"{v:.6f}" for v in values)
