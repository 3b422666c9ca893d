"""Evaluation metrics: AP at an IoU threshold, IOD-normalized regression error and jitter."""

from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.settings import DEFAULT_JITTER_OFFSETS, EVAL_MATCH_IOU, JITTER_MATCH_IOU, NUM_KEYPOINTS
from src.core.postprocess import iou_matrix, score_order
from src.models.detection import Detection, GroundTruth, Keypoints
from src.models.errors import DegenerateFaceError, EvaluationError
from src.models.reports import ImageMatches, JitterResult
from src.models.tensor import Tensor
from src.utils.image_ops import translate
from src.utils.logger import get_logger

logger = get_logger(__name__)

Detector = Callable[[Tensor], Sequence[Detection]]

BOTH_EMPTY_CONVENTION = "no predictions and no ground truth: AP defined as 1.0"
NO_TRUTH_CONVENTION = "predictions without ground truth: AP defined as 0.0"


def match_image(predictions: Sequence[Detection], truth: GroundTruth,
                match_iou: float = EVAL_MATCH_IOU) -> ImageMatches:
    """
    Greedy matching: predictions in score order each take the highest-IoU
    unmatched truth face with IoU >= match_iou.
    """
    result = ImageMatches(image_id=truth.image_id)
    order = score_order(predictions)
    if not truth.faces:
        result.false_positives = list(order)
        return result

    overlaps = iou_matrix(np.array([p.box for p in predictions]).reshape(-1, 4),
                          np.array([f.box for f in truth.faces]).reshape(-1, 4))
    taken = np.zeros(len(truth.faces), dtype=bool)
    for p in order:
        candidates = np.where(taken, -1.0, overlaps[p])
        best = int(np.argmax(candidates))
        if candidates[best] >= match_iou:
            taken[best] = True
            result.pairs.append((p, best, float(candidates[best])))
        else:
            result.false_positives.append(p)
    result.missed = [int(i) for i in np.flatnonzero(~taken)]
    return result


def match_all(predictions: Mapping[str, Sequence[Detection]], truth: Mapping[str, GroundTruth],
               match_iou: float) -> List[ImageMatches]:
    image_ids = sorted(set(predictions) | set(truth))
    return [
        match_image(predictions.get(image_id, ()), truth.get(image_id, GroundTruth(image_id)), match_iou)
        for image_id in image_ids
    ]


def ap_convention(predictions: Mapping[str, Sequence[Detection]],
                  truth: Mapping[str, GroundTruth]) -> Optional[str]:
    """Name the convention applied when there is no ground truth at all."""
    n_truth = sum(len(t.faces) for t in truth.values())
    n_pred = sum(len(p) for p in predictions.values())
    if n_truth:
        return None
    return NO_TRUTH_CONVENTION if n_pred else BOTH_EMPTY_CONVENTION


def precision_recall_area(recall: np.ndarray, precision: np.ndarray, interpolation: str = "step") -> float:
    """
    Area under a precision-recall curve.

    Both sum precision over every recall increase (all-point). "step" uses the
    precision observed at that rank; "envelope" first replaces each precision
    with the maximum precision at any equal or higher recall.
    """
    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    if interpolation == "envelope":
        mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    elif interpolation != "step":
        raise ValueError(f"Unknown interpolation '{interpolation}'")
    i = np.flatnonzero(mrec[1:] != mrec[:-1])
    return float(np.sum((mrec[i + 1] - mrec[i]) * mpre[i + 1]))


def average_precision(predictions: Mapping[str, Sequence[Detection]],
                      truth: Mapping[str, GroundTruth],
                      match_iou: float = EVAL_MATCH_IOU,
                      interpolation: str = "step") -> float:
    """
    Average precision over a set of images.

    Args:
        predictions: image id -> scored detections
        truth: image id -> ground truth
        match_iou: IoU needed for a true positive
        interpolation: "step" (precision at each recall increase) or "envelope"

    Returns:
        AP in [0, 1]
    """
    convention = ap_convention(predictions, truth)
    if convention is not None:
        logger.warning(convention)
        return 1.0 if convention == BOTH_EMPTY_CONVENTION else 0.0

    n_truth = sum(len(t.faces) for t in truth.values())
    ranked: List[Tuple[float, str, int, bool]] = []
    for matches in match_all(predictions, truth, match_iou):
        preds = predictions.get(matches.image_id, ())
        tps = {p for p, _, _ in matches.pairs}
        for rank, p in enumerate(score_order(preds)):
            ranked.append((preds[p].score, matches.image_id, rank, p in tps))
    if not ranked:
        return 0.0

    ranked.sort(key=lambda r: (-r[0], r[1], r[2]))
    hits = np.array([r[3] for r in ranked], dtype=np.float64)
    tp = np.cumsum(hits)
    fp = np.cumsum(1.0 - hits)
    recall = tp / n_truth
    precision = tp / (tp + fp)
    return precision_recall_area(recall, precision, interpolation)


def inter_ocular_distance(keypoints: Keypoints) -> float:
    """Euclidean distance between keypoint slots 0 and 1 (the eye centers)."""
    if len(keypoints) != NUM_KEYPOINTS:
        raise EvaluationError(f"Expected {NUM_KEYPOINTS} keypoints, got {len(keypoints)}")
    (x0, y0), (x1, y1) = keypoints[0], keypoints[1]
    distance = float(np.hypot(x1 - x0, y1 - y0))
    if distance == 0.0:
        raise DegenerateFaceError("Eye keypoints coincide; inter-ocular distance is zero")
    return distance


def regression_errors(predictions: Mapping[str, Sequence[Detection]],
                      truth: Mapping[str, GroundTruth],
                      match_iou: float = EVAL_MATCH_IOU) -> np.ndarray:
    """Absolute keypoint coordinate errors of matched faces, each divided by the face's IOD."""
    errors = []
    for matches in match_all(predictions, truth, match_iou):
        preds = predictions.get(matches.image_id, ())
        faces = truth[matches.image_id].faces if matches.image_id in truth else ()
        for p, t, _ in matches.pairs:
            face = faces[t]
            iod = inter_ocular_distance(face.keypoints)
            diff = np.abs(np.asarray(preds[p].keypoints, dtype=np.float64)
                          - np.asarray(face.keypoints, dtype=np.float64)).reshape(-1)
            errors.append(diff / iod)
    if not errors:
        return np.empty(0, dtype=np.float64)
    return np.concatenate(errors)


def regression_error(predictions: Mapping[str, Sequence[Detection]],
                     truth: Mapping[str, GroundTruth],
                     match_iou: float = EVAL_MATCH_IOU) -> float:
    """Median IOD-normalized absolute keypoint error over all matched faces."""
    errors = regression_errors(predictions, truth, match_iou)
    if errors.size == 0:
        raise EvaluationError("No predictions matched ground truth; regression error is undefined")
    return float(np.median(errors))


def jitter_from_detections(original: Sequence[Detection],
                           displaced: Sequence[Sequence[Detection]],
                           shifts: Sequence[Tuple[float, float]],
                           match_iou: float = JITTER_MATCH_IOU) -> JitterResult:
    """
    IOD-normalized RMS difference between original and displaced predictions.

    Args:
        original: detections on the unshifted input
        displaced: detections for each shifted input
        shifts: per shifted input, the (dx, dy) translation in normalized units
        match_iou: minimum IoU to pair a displaced detection with an original one

    Returns:
        JitterResult with the RMS value and matched/unmatched counts
    """
    if not original:
        raise EvaluationError("No detections on the original image; jitter is undefined")

    reference = np.stack([d.coordinates for d in original])
    # filled on first match; None marks an original whose eyes coincide
    iods: Dict[int, Optional[float]] = {}
    shift_pattern = np.zeros(reference.shape[1])

    squared: List[np.ndarray] = []
    unmatched = 0
    for detections, (dx, dy) in zip(displaced, shifts):
        if not detections:
            continue
        shift_pattern[0::2] = dx
        shift_pattern[1::2] = dy
        moved = np.stack([d.coordinates for d in detections]) - shift_pattern
        overlaps = iou_matrix(moved[:, :4], reference[:, :4])
        for row, coords in enumerate(moved):
            best = int(np.argmax(overlaps[row]))
            if overlaps[row, best] < match_iou:
                unmatched += 1
                continue
            if best not in iods:
                try:
                    iods[best] = inter_ocular_distance(original[best].keypoints)
                except DegenerateFaceError:
                    logger.debug(f"Original detection {best} has coincident eyes; its matches are not scored")
                    iods[best] = None
            if iods[best] is None:
                unmatched += 1
                continue
            squared.append(((coords - reference[best]) / iods[best]) ** 2)

    if not squared:
        raise EvaluationError("No displaced detection matched the original ones")
    value = float(np.sqrt(np.mean(np.concatenate(squared))))
    return JitterResult(value=value, matched=len(squared), unmatched=unmatched)


def measure_jitter(detector: Detector, image: Tensor,
                   offsets: Sequence[Tuple[int, int]] = DEFAULT_JITTER_OFFSETS,
                   match_iou: float = JITTER_MATCH_IOU) -> JitterResult:
    """Run `detector` on the image and on edge-replicated translated copies."""
    original = list(detector(image))
    if not original:
        raise EvaluationError("No detections on the original image; jitter is undefined")

    displaced = []
    shifts = []
    for dx, dy in offsets:
        displaced.append(list(detector(translate(image, dx, dy))))
        shifts.append((dx / image.width, dy / image.height))
    result = jitter_from_detections(original, displaced, shifts, match_iou)
    logger.debug(f"Jitter {result.value:.5f} over {result.matched} matches ({result.unmatched} unmatched)")
    return result


def jitter_metric(detector: Detector, image: Tensor,
                  offsets: Sequence[Tuple[int, int]] = DEFAULT_JITTER_OFFSETS,
                  match_iou: float = JITTER_MATCH_IOU) -> float:
    """IOD-normalized RMS coordinate change under small input translations."""
    return measure_jitter(detector, image, offsets, match_iou).value
