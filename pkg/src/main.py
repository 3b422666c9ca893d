"""Command-line entry point for the BlazeFace desk stack."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from config.settings import (
    DEFAULT_CLUSTER_IOU,
    DEFAULT_MIN_FACE_AREA,
    DEFAULT_MIN_SCORE,
    DEFAULT_RANDOM_SEED,
    DEFAULT_TIMING_ITERATIONS,
)
from src.core import analysis
from src.core.anchors import anchor_table, generate_anchors
from src.core.blaze_net import blank_input
from src.core.detector import FaceDetector, format_detection
from src.core.evaluator import DatasetEvaluator
from src.core.metrics import measure_jitter
from src.models.detection import TieMode, TiePolicy
from src.models.detector_config import DetectorConfig
from src.models.errors import BlazeError
from src.models.network import blazeface_frontal_spec
from src.models.weights import WeightStore, init_random_weights
from src.parsers.ppm_reader import load_image
from src.parsers.weight_file import load_weights, save_weights
from src.utils.logger import get_logger, log_summary, setup_logging

logger = get_logger(__name__)

TIE_MODES = {"blend": TieMode.BLENDING, "nms": TieMode.SUPPRESSION}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog="blazeface",
        description="Single-shot face detection, evaluation and cost analysis"
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Enable verbose logging"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    detect = commands.add_parser("detect", help="Detect faces in a PPM image")
    detect.add_argument("--weights", type=Path, required=True, help="BLZW weight file")
    detect.add_argument("--image", type=Path, required=True, help="Binary PPM (P6) image")
    detect.add_argument("--min-score", type=float, default=DEFAULT_MIN_SCORE,
                        help="Minimum detection score")
    detect.add_argument("--tie-resolution", choices=sorted(TIE_MODES), default="blend",
                        help="Resolve overlapping detections by blending or suppression")
    detect.add_argument("--cluster-iou", type=float, default=DEFAULT_CLUSTER_IOU,
                        help="IoU at which detections join a cluster")

    evaluate = commands.add_parser("eval", help="Evaluate on a dataset index")
    evaluate.add_argument("--weights", type=Path, required=True, help="BLZW weight file")
    evaluate.add_argument("--dataset", type=Path, required=True, help="Dataset index file")
    evaluate.add_argument("--min-face-area", type=float, default=DEFAULT_MIN_FACE_AREA,
                          help="Ignore faces smaller than this normalized area")
    evaluate.add_argument("--workers", type=int, default=1, help="Images evaluated in parallel")
    evaluate.add_argument("--skip-jitter", action="store_true", help="Do not measure jitter")

    jitter = commands.add_parser("jitter", help="Measure jitter on one image")
    jitter.add_argument("--weights", type=Path, required=True, help="BLZW weight file")
    jitter.add_argument("--image", type=Path, required=True, help="Binary PPM (P6) image")

    anchors = commands.add_parser("anchors", help="Anchor table")
    anchors.add_argument("--dump", action="store_true", help="Print the anchor table as CSV")
    anchors.add_argument("--out", type=Path, help="Write the anchor table to this CSV file")

    analyze = commands.add_parser("analyze", help="Cost, receptive field and timing reports")
    analyze.add_argument("--report", choices=["macs", "rf", "timing", "tie", "anchors"], required=True)
    analyze.add_argument("--csv", type=Path, help="Also write the table to this CSV file")
    analyze.add_argument("--compare-kernel", type=int,
                         help="With --report rf, compare against this depthwise kernel size")
    analyze.add_argument("--iterations", type=int, default=DEFAULT_TIMING_ITERATIONS,
                         help="Timed iterations for --report timing")
    analyze.add_argument("--parallel", type=int, default=1, help="Convolution threads for --report timing")
    analyze.add_argument("--weights", type=Path, help="Weights for --report timing (random if omitted)")
    analyze.add_argument("--seed", type=int, default=DEFAULT_RANDOM_SEED,
                         help="Seed for random weights and the tie benchmark")

    init = commands.add_parser("init-weights", help="Write seeded random weights")
    init.add_argument("--seed", type=int, required=True, help="Random seed")
    init.add_argument("--out", type=Path, required=True, help="Output weight file")

    return parser


def _load_detector(weights_path: Path, config: Optional[DetectorConfig] = None) -> FaceDetector:
    spec = blazeface_frontal_spec()
    return FaceDetector(load_weights(weights_path, spec), config, spec)


def _emit_table(frame: pd.DataFrame, csv_path: Optional[Path]) -> None:
    print(frame.to_string(index=False))
    if csv_path:
        frame.to_csv(csv_path, index=False)
        logger.info(f"Wrote {len(frame)} rows to {csv_path}")


def run_detect(args: argparse.Namespace) -> int:
    policy = TiePolicy(mode=TIE_MODES[args.tie_resolution], iou_threshold=args.cluster_iou)
    detector = _load_detector(args.weights, DetectorConfig(min_score=args.min_score, tie_policy=policy))
    for detection in detector(load_image(args.image)):
        print(format_detection(detection))
    return 0


def run_eval(args: argparse.Namespace) -> int:
    config = DetectorConfig(min_face_area=args.min_face_area)
    evaluator = DatasetEvaluator(_load_detector(args.weights, config), workers=args.workers,
                                 skip_jitter=args.skip_jitter)
    report = evaluator.evaluate(args.dataset)
    print(report.to_text())
    log_summary(report.stats, report.as_key_values())

    failed = report.stats.get("failed", 0)
    if failed > 0:
        logger.warning(f"{failed} images failed evaluation")
        return 1
    return 0


def run_jitter(args: argparse.Namespace) -> int:
    detector = _load_detector(args.weights)
    result = measure_jitter(detector, load_image(args.image), detector.config.jitter_offsets)
    print(f"jitter_iod={result.value:.6f} matched={result.matched} unmatched={result.unmatched}")
    return 0


def run_anchors(args: argparse.Namespace) -> int:
    table = anchor_table(generate_anchors())
    if args.out:
        table.to_csv(args.out, index=False)
        logger.info(f"Wrote {len(table)} anchors to {args.out}")
    if args.dump or not args.out:
        print(table.to_csv(index=False), end="")
    return 0


def _timing_weights(args: argparse.Namespace) -> WeightStore:
    spec = blazeface_frontal_spec()
    if args.weights:
        return load_weights(args.weights, spec)
    return init_random_weights(spec, args.seed)


def run_analyze(args: argparse.Namespace) -> int:
    spec = blazeface_frontal_spec()
    if args.report == "macs":
        cost = analysis.network_cost(spec)
        _emit_table(cost.to_frame(), args.csv)
        print(f"total_macs={cost.total_macs}")
        print(f"dispatches={cost.dispatch_count} extractor_dispatches={cost.extractor_dispatch_count}")
    elif args.report == "rf":
        rf = analysis.receptive_field(spec)
        _emit_table(rf.to_frame(), args.csv)
        print(" ".join(f"rf_{name}={rf.rf_at(name)}" for name in sorted(rf.taps)))
        if args.compare_kernel:
            print(analysis.compare_receptive_fields(spec, args.compare_kernel).to_string(index=False))
    elif args.report == "timing":
        report = analysis.time_layers(spec, _timing_weights(args), blank_input(),
                                      iterations=args.iterations, threads=args.parallel, show_progress=True)
        _emit_table(report.to_frame(), args.csv)
        print(f"layer_median_sum_ms={report.layer_median_sum_ms:.3f}")
        print(f"outputs_identical={str(report.outputs_identical).lower()}")
    elif args.report == "tie":
        report = analysis.tie_resolution_benchmark(seed=args.seed)
        if args.csv:
            report.to_frame().to_csv(args.csv, index=False)
        print(f"trials={report.trials} blend_win_rate={report.blend_win_rate:.4f} "
              f"median_reduction={report.median_reduction:.4f}")
    else:
        _emit_table(analysis.anchor_scheme_comparison(spec), args.csv)
    return 0


def run_init_weights(args: argparse.Namespace) -> int:
    save_weights(init_random_weights(blazeface_frontal_spec(), args.seed), args.out)
    return 0


HANDLERS = {
    "detect": run_detect,
    "eval": run_eval,
    "jitter": run_jitter,
    "anchors": run_anchors,
    "analyze": run_analyze,
    "init-weights": run_init_weights,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch the subcommand and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    setup_logging(verbose=args.verbose)

    try:
        return HANDLERS[args.command](args)
    except BlazeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return 1


def main():
    """Main function."""
    sys.exit(run())


if __name__ == "__main__":
    main()
