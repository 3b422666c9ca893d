"""Logging setup, the image error log and the dataset run summary."""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import colorlog

from config.settings import LOG_DATE_FORMAT, LOG_DIR, LOG_FILENAME, LOG_FORMAT
from src.models.errors import BlazeError

ERROR_LOG_PATH = LOG_DIR / LOG_FILENAME

LEVEL_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}


def setup_logging(verbose: bool = False, error_log: Optional[Path] = None) -> None:
    """
    Route colored records to stderr and ERROR records to the error log.

    stdout is reserved for detections and reports.

    Args:
        verbose: Enable DEBUG records (per-layer shapes, cluster sizes)
        error_log: Override for the error log file
    """
    level = logging.DEBUG if verbose else logging.INFO

    console = logging.StreamHandler()
    console.setLevel(level)
    console.setFormatter(colorlog.ColoredFormatter(
        "%(log_color)s" + LOG_FORMAT, LOG_DATE_FORMAT, log_colors=LEVEL_COLORS))

    errors = logging.FileHandler(error_log or ERROR_LOG_PATH, mode="a")
    errors.setLevel(logging.ERROR)
    errors.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))

    root = logging.getLogger()
    root.setLevel(level)
    root.handlers.clear()
    root.addHandler(console)
    root.addHandler(errors)


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def error_log_path() -> Optional[Path]:
    """File the ERROR handler from setup_logging writes to, if one is installed."""
    for handler in logging.getLogger().handlers:
        if isinstance(handler, logging.FileHandler) and handler.level == logging.ERROR:
            return Path(handler.baseFilename)
    return None


def format_error_fields(error: Union[BlazeError, Exception, str]) -> str:
    """Render an error as `type: message key=value ...` for the error log."""
    if isinstance(error, BlazeError):
        fields = " ".join(f"{k}={v}" for k, v in error.fields.items() if v is not None)
        text = f"{error.error_type}: {error.message}"
        return f"{text} {fields}" if fields else text
    if isinstance(error, Exception):
        return f"{type(error).__name__}: {error}"
    return error


def log_error(error: Union[BlazeError, Exception, str], image_path: Optional[Path] = None) -> None:
    """
    Log a per-image failure at ERROR level.

    The file handler installed by setup_logging writes it to the error log.
    Structured errors keep their fields (byte offset, axis, layer) on the line.

    Args:
        error: The failure, or a plain message
        image_path: Image the failure belongs to
    """
    message = format_error_fields(error)
    if image_path:
        message = f"[{image_path}] {message}"

    get_logger("blazeface.errors").error(message)


def log_summary(stats: Dict[str, Any], metrics: Optional[Dict[str, str]] = None) -> None:
    """
    Log the banner closing a dataset run.

    Args:
        stats: Image counts from the evaluator (total_images, processed, failed)
        metrics: Rendered metric values, e.g. EvalReport.as_key_values()
    """
    logger = get_logger("blazeface.summary")

    logger.info("=" * 60)
    logger.info("EVALUATION SUMMARY")
    logger.info("=" * 60)
    logger.info(f"Images: {stats.get('total_images', 0)} "
                f"(processed {stats.get('processed', 0)}, failed {stats.get('failed', 0)})")

    for key in ("average_precision", "median_abs_regression_error_iod", "jitter_iod"):
        if metrics and key in metrics:
            logger.info(f"{key}: {metrics[key]}")

    for failure in stats.get("errors", []):
        logger.warning(f"  failed: {failure['image']}")
    if stats.get("failed", 0) > 0:
        logger.warning(f"Details in {error_log_path() or 'the console output'}")

    logger.info("=" * 60)
