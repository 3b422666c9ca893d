"""Tests for roll estimation and rotated face crops."""

import math

import numpy as np
import pytest

from src.core.face_roi import extract_roi, face_roi, roll_angle, to_roi_coordinates
from src.models.detection import Detection, FaceRoi
from src.models.errors import DegenerateFaceError
from src.models.tensor import Tensor


def _eyes(left, right):
    return (left, right) + ((0.5, 0.5),) * 4


def _upright_keypoints(box):
    xmin, ymin, xmax, ymax = box
    w, h = xmax - xmin, ymax - ymin
    rel = [(0.3, 0.35), (0.7, 0.35), (0.5, 0.55), (0.5, 0.75), (0.05, 0.45), (0.95, 0.45)]
    return [(xmin + rx * w, ymin + ry * h) for rx, ry in rel]


class TestRollAngle:
    """Test suite for roll_angle."""

    @pytest.mark.parametrize("left, right, expected", [
        ((0.4, 0.5), (0.6, 0.5), 0.0),
        ((0.4, 0.4), (0.6, 0.6), math.pi / 4),
        ((0.4, 0.6), (0.6, 0.4), -math.pi / 4),
        ((0.5, 0.4), (0.5, 0.6), math.pi / 2),
        ((0.6, 0.5), (0.4, 0.5), math.pi),
        ((0.4, 0.5), (0.4 + math.sqrt(3) / 10, 0.6), math.pi / 6),
    ])
    def test_hand_computed(self, left, right, expected):
        assert roll_angle(_eyes(left, right)) == pytest.approx(expected)

    def test_coincident_eyes(self):
        with pytest.raises(DegenerateFaceError):
            roll_angle(_eyes((0.5, 0.5), (0.5, 0.5)))


class TestFaceRoi:
    """Test suite for face_roi and the region geometry."""

    def test_upright_region(self):
        box = (0.4, 0.4, 0.6, 0.7)
        roi = face_roi(Detection(box=box, keypoints=tuple(_upright_keypoints(box)), score=0.9))
        assert (roi.cx, roi.cy) == pytest.approx((0.5, 0.55))
        assert roi.size == pytest.approx(0.45)
        assert roi.angle == pytest.approx(0.0)
        np.testing.assert_allclose(roi.corners(), [[0.275, 0.325], [0.725, 0.325],
                                                   [0.725, 0.775], [0.275, 0.775]])

    def test_quarter_turn_corners(self):
        corners = FaceRoi(cx=0.5, cy=0.5, size=0.2, angle=math.pi / 2).corners()
        # the region's top-left lands on screen top-right
        np.testing.assert_allclose(corners, [[0.6, 0.4], [0.6, 0.6], [0.4, 0.6], [0.4, 0.4]], atol=1e-12)

    def test_rotated_face_maps_to_upright_frame(self):
        box = (0.3, 0.35, 0.5, 0.55)
        center = np.array([0.4, 0.45])
        theta = 0.5
        rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        upright = np.array(_upright_keypoints(box))
        tilted = (upright - center) @ rot.T + center
        detection = Detection(box=box, keypoints=tuple(map(tuple, tilted)), score=0.9)

        roi = face_roi(detection, scale=2.0)
        assert roi.angle == pytest.approx(theta)
        mapped = to_roi_coordinates(roi, tilted)
        np.testing.assert_allclose(mapped, (upright - center) / 0.4 + 0.5, atol=1e-12)
        assert mapped[0, 1] == pytest.approx(mapped[1, 1])
        np.testing.assert_allclose(to_roi_coordinates(roi, [center]), [[0.5, 0.5]])

    def test_invalid_scale(self):
        box = (0.4, 0.4, 0.6, 0.6)
        with pytest.raises(ValueError):
            face_roi(Detection(box=box, keypoints=tuple(_upright_keypoints(box)), score=0.9), scale=0.0)


class TestExtractRoi:
    """Test suite for resampling the rotated crop."""

    def test_whole_image_is_identity(self, rng):
        data = rng.standard_normal((1, 8, 8, 3)).astype(np.float32)
        crop = extract_roi(Tensor(data), FaceRoi(cx=0.5, cy=0.5, size=1.0, angle=0.0), size=8)
        np.testing.assert_array_equal(crop.data, data)

    def test_quarter_turn(self, rng):
        data = rng.standard_normal((1, 8, 8, 2)).astype(np.float32)
        crop = extract_roi(Tensor(data), FaceRoi(cx=0.5, cy=0.5, size=1.0, angle=math.pi / 2), size=8)
        np.testing.assert_allclose(crop.data[0], np.rot90(data[0]), atol=1e-5)

    def test_center_quarter_upsampled(self):
        data = np.zeros((1, 4, 4, 1), dtype=np.float32)
        data[0, 1:3, 1:3, 0] = 1.0
        crop = extract_roi(Tensor(data), FaceRoi(cx=0.5, cy=0.5, size=0.5, angle=0.0), size=2)
        np.testing.assert_array_equal(crop.data[0, :, :, 0], np.ones((2, 2)))

    def test_outside_replicates_edge(self):
        data = np.arange(16, dtype=np.float32).reshape(1, 4, 4, 1)
        crop = extract_roi(Tensor(data), FaceRoi(cx=-1.0, cy=-1.0, size=0.5, angle=0.0), size=3)
        assert np.all(crop.data == 0.0)
