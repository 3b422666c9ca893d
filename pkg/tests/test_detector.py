"""Tests for the end-to-end detector."""

import numpy as np
import pytest

from src.core.anchors import generate_anchors
from src.core.detector import FaceDetector, detect, format_detection
from src.models.detection import Detection, TieMode, TiePolicy
from src.models.detector_config import CameraProfile, DetectorConfig
from src.models.errors import ConfigError, WeightsError
from src.models.weights import WeightStore


def _with_heads(store, bias16, bias8):
    tensors = dict(store.items())
    tensors["head_map16/kernel"] = np.zeros((1, 1, 96, 34))
    tensors["head_map16/bias"] = bias16
    tensors["head_map8/kernel"] = np.zeros((1, 1, 96, 102))
    tensors["head_map8/bias"] = bias8
    return WeightStore(tensors)


@pytest.fixture(scope="module")
def detector(random_weights):
    return FaceDetector(random_weights, DetectorConfig(min_score=0.0))


class TestFaceDetector:
    """Test suite for FaceDetector.detect."""

    def test_deterministic(self, detector, random_image):
        assert detector.detect(random_image) == detector.detect(random_image)

    def test_outputs_normalized_and_finite(self, detector, random_image):
        detections = detector(random_image)
        assert detections
        coords = np.stack([d.coordinates for d in detections])
        assert np.all(np.isfinite(coords))
        assert coords.min() >= 0.0 and coords.max() <= 1.0
        assert all(0.0 <= d.score <= 1.0 for d in detections)

    def test_sorted_by_score(self, detector, random_image):
        scores = [d.score for d in detector(random_image)]
        assert scores == sorted(scores, reverse=True)

    def test_bias_only_heads_fire_every_map16_cell(self, random_weights, random_image):
        bias16 = np.zeros(34)
        bias16[0] = 3.0
        bias16[17] = -3.0
        bias16[3:5] = 10.0  # width and height of slot 0
        bias8 = np.full(102, 0.0)
        bias8[0::17] = -3.0
        weights = _with_heads(random_weights, bias16, bias8)

        detections = FaceDetector(weights).detect(random_image)
        anchors = generate_anchors()
        assert [d.anchor_index for d in detections] == list(range(0, 512, 2))
        interior = [d for d in detections if 0 < anchors[d.anchor_index].row < 15
                    and 0 < anchors[d.anchor_index].col < 15]
        assert len(interior) == 14 * 14
        for d in interior:
            anchor = anchors[d.anchor_index]
            assert (d.box[0] + d.box[2]) / 2 == pytest.approx(anchor.cx, abs=1e-6)
            assert (d.box[1] + d.box[3]) / 2 == pytest.approx(anchor.cy, abs=1e-6)
            assert d.box[2] - d.box[0] == pytest.approx(10 / 128, abs=1e-6)

    def test_single_forced_anchor(self, random_weights, random_image):
        anchors = generate_anchors()
        target = 600
        scores = np.full(896, -20.0)
        scores[target] = 4.0
        regressors = np.zeros((896, 16))
        regressors[:, 2:4] = 16.0

        detector = FaceDetector(random_weights)
        detector.net = lambda image: (scores, regressors)
        (only,) = detector.detect(random_image)
        assert only.anchor_index == target
        assert only.box == pytest.approx((anchors[target].cx - 1 / 16, anchors[target].cy - 1 / 16,
                                          anchors[target].cx + 1 / 16, anchors[target].cy + 1 / 16))

    def test_tie_policies_agree_on_count(self, random_weights, random_image):
        blend = FaceDetector(random_weights, DetectorConfig(min_score=0.3))
        suppress = FaceDetector(random_weights, DetectorConfig(
            min_score=0.3, tie_policy=TiePolicy(TieMode.SUPPRESSION)))
        assert len(blend(random_image)) == len(suppress(random_image))

    def test_rejects_incomplete_weights(self, random_weights):
        tensors = dict(random_weights.items())
        del tensors["block05/pw1/kernel"]
        with pytest.raises(WeightsError) as exc_info:
            FaceDetector(WeightStore(tensors))
        assert exc_info.value.layer == "block05/pw1"

    def test_module_level_detect(self, random_weights, random_image):
        config = DetectorConfig(min_score=0.0)
        assert detect(random_image, random_weights, config) == FaceDetector(random_weights, config)(random_image)


class TestDetectorConfig:
    """Test suite for configuration validation."""

    def test_defaults(self):
        config = DetectorConfig()
        assert config.min_score == 0.5
        assert config.tie_policy.mode == TieMode.BLENDING
        assert config.tie_policy.iou_threshold == 0.3
        assert len(config.jitter_offsets) == 12

    @pytest.mark.parametrize("kwargs", [
        {"min_score": 1.5},
        {"min_face_area": -0.1},
        {"jitter_offsets": ()},
        {"jitter_offsets": ((0, 0),)},
        {"camera": CameraProfile.REAR},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            DetectorConfig(**kwargs)


def test_format_detection():
    detection = Detection(box=(0.1, 0.2, 0.3, 0.4), keypoints=((0.25, 0.5),) * 6, score=0.875)
    line = format_detection(detection)
    fields = line.split(" ")
    assert len(fields) == 17
    assert fields[:5] == ["0.875000", "0.100000", "0.200000", "0.300000", "0.400000"]
    assert fields[5:7] == ["0.250000", "0.500000"]
