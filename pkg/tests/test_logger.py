"""Tests for the error log and run summary helpers."""

import logging

import pytest

from src.models.errors import DatasetFormatError, WeightFileError
from src.utils import logger as log


@pytest.fixture
def error_log(tmp_path):
    path = tmp_path / "errors.log"
    log.setup_logging(error_log=path)
    yield path
    for handler in logging.getLogger().handlers:
        handler.close()


class TestErrorLog:
    """Test suite for log_error and its field rendering."""

    def test_structured_fields_kept(self):
        error = WeightFileError("truncated tensor data", offset=44, expected=108, actual=60)
        text = log.format_error_fields(error)
        assert text == "weight_file_error: truncated tensor data offset=44 expected=108 actual=60"

    def test_unset_fields_dropped(self):
        assert log.format_error_fields(DatasetFormatError("bad face")) == "dataset_format_error: bad face"

    def test_plain_exception_and_message(self):
        assert log.format_error_fields(FileNotFoundError("a.ppm")) == "FileNotFoundError: a.ppm"
        assert log.format_error_fields("free text") == "free text"

    def test_written_once_with_image_path(self, error_log, tmp_path):
        image = tmp_path / "a.ppm"
        log.log_error(WeightFileError("bad magic", offset=0), image)
        log.log_error("second")
        lines = error_log.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].endswith(f"ERROR - [{image}] weight_file_error: bad magic offset=0")
        assert lines[1].endswith("ERROR - second")

    def test_configured_path_reported(self, error_log):
        assert log.error_log_path() == error_log

    def test_info_not_in_error_log(self, error_log):
        log.get_logger("blazeface.test").info("fine")
        assert error_log.read_text() == ""


class TestSummary:
    """Test suite for log_summary."""

    def test_counts_and_metrics(self, caplog):
        stats = {"total_images": 3, "processed": 2, "failed": 1,
                 "errors": [{"image": "c.ppm", "error": "missing"}]}
        with caplog.at_level(logging.INFO):
            log.log_summary(stats, {"average_precision": "0.805556", "jitter_iod": "nan"})
        text = caplog.text
        assert "Images: 3 (processed 2, failed 1)" in text
        assert "average_precision: 0.805556" in text
        assert "failed: c.ppm" in text
        assert "median_abs_regression_error_iod" not in text

    def test_failures_point_at_error_log(self, error_log, caplog):
        with caplog.at_level(logging.INFO):
            log.log_summary({"total_images": 1, "processed": 0, "failed": 1,
                             "errors": [{"image": "a.ppm", "error": "missing"}]})
        assert f"Details in {error_log}" in caplog.text

    def test_clean_run_has_no_warnings(self, caplog):
        with caplog.at_level(logging.INFO):
            log.log_summary({"total_images": 1, "processed": 1, "failed": 0, "errors": []})
        assert not [r for r in caplog.records if r.levelno >= logging.WARNING]
