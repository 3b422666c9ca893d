"""Tests for IoU and tie resolution."""

import numpy as np
import pytest

from src.core.postprocess import iou, iou_matrix, resolve
from src.models.detection import Detection, TieMode, TiePolicy
from src.models.errors import ConfigError

KEYPOINTS = tuple((0.5, 0.5) for _ in range(6))
BLEND = TiePolicy(TieMode.BLENDING, 0.3)
SUPPRESS = TiePolicy(TieMode.SUPPRESSION, 0.3)


def _det(box, score, anchor_index=0, keypoints=KEYPOINTS):
    return Detection(box=tuple(box), keypoints=keypoints, score=score, anchor_index=anchor_index)


def _random_detections(rng, n=30):
    detections = []
    for i in range(n):
        x, y = rng.uniform(0.0, 0.7, size=2)
        w, h = rng.uniform(0.05, 0.3, size=2)
        keypoints = tuple((float(a), float(b)) for a, b in rng.uniform(0, 1, size=(6, 2)))
        detections.append(_det((x, y, x + w, y + h), float(rng.uniform(0.5, 1.0)), i, keypoints))
    return detections


def _greedy_clusters(detections, threshold):
    """Members of each cluster keyed by the anchor index of its top detection."""
    ordered = sorted(detections, key=lambda d: (-d.score, d.anchor_index))
    overlaps = iou_matrix(np.array([d.box for d in ordered]), np.array([d.box for d in ordered]))
    taken = set()
    clusters = {}
    for i, top in enumerate(ordered):
        if i in taken:
            continue
        members = [j for j in range(len(ordered)) if j not in taken and (j == i or overlaps[i, j] >= threshold)]
        taken.update(members)
        clusters[top.anchor_index] = [ordered[j] for j in members]
    return clusters


class TestIoU:
    """Test suite for box overlap."""

    def test_identical(self):
        assert iou((0, 0, 1, 1), (0, 0, 1, 1)) == 1.0

    def test_disjoint(self):
        assert iou((0, 0, 1, 1), (2, 2, 3, 3)) == 0.0

    def test_half_shift(self):
        assert iou((0, 0, 1, 1), (0.5, 0, 1.5, 1)) == pytest.approx(1 / 3)

    def test_empty_union(self):
        assert iou((0.5, 0.5, 0.5, 0.5), (0.5, 0.5, 0.5, 0.5)) == 0.0

    def test_matrix_matches_scalar(self, rng):
        a = [d.box for d in _random_detections(rng, 5)]
        b = [d.box for d in _random_detections(rng, 4)]
        m = iou_matrix(np.array(a), np.array(b))
        for i in range(5):
            for j in range(4):
                assert m[i, j] == pytest.approx(iou(a[i], b[j]))


class TestResolve:
    """Test suite for blending and suppression."""

    def test_single_detection_unchanged(self):
        d = _det((0.1, 0.1, 0.4, 0.4), 0.8)
        assert resolve([d], BLEND) == [d]
        assert resolve([d], SUPPRESS) == [d]

    def test_identical_boxes_blend(self):
        out = resolve([_det((0.1, 0.1, 0.5, 0.5), 0.6, 0), _det((0.1, 0.1, 0.5, 0.5), 0.4, 1)], BLEND)
        assert len(out) == 1
        assert out[0].box == pytest.approx((0.1, 0.1, 0.5, 0.5))
        assert out[0].score == 0.6

    def test_weighted_mean_pair(self):
        a = _det((0, 0, 1, 1), 0.75, 0)
        b = _det((0.1, 0.1, 1.1, 1.1), 0.25, 1)
        assert iou(a.box, b.box) == pytest.approx(0.681, abs=1e-3)
        (out,) = resolve([a, b], BLEND)
        assert out.box == pytest.approx((0.025, 0.025, 1.025, 1.025))
        assert out.score == 0.75

    def test_suppression_keeps_top(self):
        a = _det((0, 0, 1, 1), 0.75, 0)
        b = _det((0.1, 0.1, 1.1, 1.1), 0.25, 1)
        assert resolve([b, a], SUPPRESS) == [a]

    def test_keypoints_blended(self):
        kp_a = tuple((0.2, 0.2) for _ in range(6))
        kp_b = tuple((0.6, 0.6) for _ in range(6))
        (out,) = resolve([_det((0, 0, 1, 1), 0.5, 0, kp_a), _det((0, 0, 1, 1), 0.5, 1, kp_b)], BLEND)
        assert out.keypoints[0] == pytest.approx((0.4, 0.4))

    def test_zero_scores_blend_uniformly(self):
        (out,) = resolve([_det((0, 0, 0.4, 0.4), 0.0, 0), _det((0.1, 0, 0.5, 0.4), 0.0, 1)], BLEND)
        assert out.box == pytest.approx((0.05, 0.0, 0.45, 0.4))

    def test_score_tie_broken_by_anchor_index(self):
        a = _det((0, 0, 0.2, 0.2), 0.7, 5)
        b = _det((0.5, 0.5, 0.7, 0.7), 0.7, 2)
        assert [d.anchor_index for d in resolve([a, b], SUPPRESS)] == [2, 5]

    def test_modes_agree_on_cluster_count(self, rng):
        detections = _random_detections(rng)
        assert len(resolve(detections, BLEND)) == len(resolve(detections, SUPPRESS))

    def test_blend_within_member_hull(self, rng):
        detections = _random_detections(rng)
        clusters = _greedy_clusters(detections, BLEND.iou_threshold)
        assert any(len(members) > 1 for members in clusters.values())
        for out in resolve(detections, BLEND):
            members = clusters[out.anchor_index]
            coords = np.stack([d.coordinates for d in members])
            scores = np.array([d.score for d in members])
            assert np.all(out.coordinates >= coords.min(axis=0))
            assert np.all(out.coordinates <= coords.max(axis=0))
            np.testing.assert_allclose(out.coordinates, scores @ coords / scores.sum(), atol=1e-12)
            assert out.score == max(scores)

    def test_singletons_identical_across_modes(self):
        detections = [_det((0.1 * i, 0, 0.1 * i + 0.05, 0.05), 0.5 + 0.01 * i, i) for i in range(8)]
        assert resolve(detections, BLEND) == resolve(detections, SUPPRESS)

    def test_permutation_invariant(self, rng):
        detections = _random_detections(rng)
        shuffled = [detections[i] for i in rng.permutation(len(detections))]
        assert resolve(detections, BLEND) == resolve(shuffled, BLEND)

    def test_sorted_by_score(self, rng):
        scores = [d.score for d in resolve(_random_detections(rng), BLEND)]
        assert scores == sorted(scores, reverse=True)

    def test_empty(self):
        assert resolve([], BLEND) == []

    def test_invalid_threshold(self):
        with pytest.raises(ConfigError):
            TiePolicy(TieMode.BLENDING, 0.0)
