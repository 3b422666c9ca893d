"""Dataset evaluation harness: AP, regression error and jitter over an index file."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from config.settings import CONTINUE_ON_ERROR, EVAL_MATCH_IOU
from src.core.detector import FaceDetector
from src.core.metrics import (
    ap_convention,
    average_precision,
    match_all,
    measure_jitter,
    regression_error,
)
from src.models.detection import Detection, GroundTruth
from src.models.detector_config import DetectorConfig
from src.models.errors import BlazeError, DegenerateFaceError, EvaluationError
from src.models.reports import EvalReport
from src.parsers.dataset_index import DatasetEntry, load_dataset_index
from src.parsers.ppm_reader import load_image
from src.utils.logger import get_logger, log_error

logger = get_logger(__name__)


@dataclass
class ImageResult:
    image_id: str
    detections: List[Detection]
    jitter: Optional[float] = None
    error: Optional[str] = None


class DatasetEvaluator:
    """Runs a detector over every image of a dataset index and scores it."""

    def __init__(self, detector: FaceDetector, config: Optional[DetectorConfig] = None,
                 workers: int = 1, skip_jitter: bool = False,
                 continue_on_error: bool = CONTINUE_ON_ERROR, show_progress: bool = True):
        self.detector = detector
        self.config = config or detector.config
        self.workers = max(1, workers)
        self.skip_jitter = skip_jitter
        self.continue_on_error = continue_on_error
        self.show_progress = show_progress

    def _keep(self, area: float) -> bool:
        return area >= self.config.min_face_area

    def filter_truth(self, truth: GroundTruth) -> GroundTruth:
        """Drop faces smaller than the configured minimum area."""
        return GroundTruth(truth.image_id, tuple(f for f in truth.faces if self._keep(f.area)))

    def process_image(self, entry: DatasetEntry) -> ImageResult:
        """
        Detect faces in one image and, unless skipped, measure its jitter.

        Failures are captured in the result when continue_on_error is set.
        """
        image_id = entry.truth.image_id
        try:
            image = load_image(entry.image_path)
            detections = [d for d in self.detector(image) if self._keep(d.area)]
            jitter = None
            if not self.skip_jitter and detections:
                try:
                    jitter = measure_jitter(self.detector, image, self.config.jitter_offsets).value
                except (EvaluationError, DegenerateFaceError) as e:
                    logger.debug(f"{image_id}: no jitter value ({e})")
            return ImageResult(image_id=image_id, detections=detections, jitter=jitter)
        except (BlazeError, OSError) as e:
            if not self.continue_on_error:
                raise
            log_error(e, entry.image_path)
            return ImageResult(image_id=image_id, detections=[], error=str(e))

    def _run(self, entries: Sequence[DatasetEntry]) -> List[ImageResult]:
        progress = dict(total=len(entries), desc="Evaluating", unit="img", disable=not self.show_progress)
        if self.workers == 1:
            return [self.process_image(e) for e in tqdm(entries, **progress)]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(tqdm(pool.map(self.process_image, entries), **progress))

    def evaluate_entries(self, entries: Sequence[DatasetEntry]) -> EvalReport:
        """
        Score a detector on already-parsed dataset entries.

        Failed images are left out of every metric and counted in the stats.

        Returns:
            EvalReport with AP, median regression error, mean jitter and stats
        """
        stats: Dict[str, Any] = {"total_images": len(entries), "processed": 0, "failed": 0, "errors": []}
        predictions: Dict[str, List[Detection]] = {}
        truth: Dict[str, GroundTruth] = {}
        jitters: List[float] = []

        by_id = {e.truth.image_id: e for e in entries}
        for result in self._run(entries):
            if result.error is not None:
                stats["failed"] += 1
                stats["errors"].append({"image": result.image_id, "error": result.error})
                continue
            stats["processed"] += 1
            predictions[result.image_id] = result.detections
            truth[result.image_id] = self.filter_truth(by_id[result.image_id].truth)
            if result.jitter is not None:
                jitters.append(result.jitter)

        ap = average_precision(predictions, truth, EVAL_MATCH_IOU)
        try:
            reg_error: Optional[float] = regression_error(predictions, truth, EVAL_MATCH_IOU)
        except (EvaluationError, DegenerateFaceError) as e:
            logger.warning(str(e))
            reg_error = None

        report = EvalReport(
            average_precision=ap,
            median_abs_regression_error_iod=reg_error,
            jitter_iod=float(np.mean(jitters)) if jitters else None,
            matches=match_all(predictions, truth, EVAL_MATCH_IOU),
            ap_convention=ap_convention(predictions, truth),
            stats=stats,
        )
        logger.info(f"AP {ap:.4f} over {stats['processed']} images")
        return report

    def evaluate(self, index_path: Path) -> EvalReport:
        """Load a dataset index file and evaluate every image in it."""
        return self.evaluate_entries(load_dataset_index(index_path))
