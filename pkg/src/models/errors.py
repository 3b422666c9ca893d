"""Structured error types raised across the detector stack."""

from typing import Any, Dict, Optional


class BlazeError(Exception):
    """Base class for all structured errors; carries fields for logging."""

    error_type = "blaze_error"

    def __init__(self, message: str, **fields: Any):
        super().__init__(message)
        self.message = message
        self.fields = fields

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for logging."""
        return {"type": self.error_type, "message": self.message, **self.fields}


class ShapeError(BlazeError):
    """Dimension mismatch on a named axis."""

    error_type = "shape_error"

    def __init__(self, message: str, axis: Optional[str] = None,
                 expected: Any = None, actual: Any = None):
        super().__init__(message, axis=axis, expected=expected, actual=actual)
        self.axis = axis
        self.expected = expected
        self.actual = actual


class WeightsError(BlazeError):
    """Missing or malformed entry in a weight store."""

    error_type = "weights_error"

    def __init__(self, message: str, layer: Optional[str] = None):
        super().__init__(message, layer=layer)
        self.layer = layer


class WeightFileError(BlazeError):
    """Corrupt or truncated weight file."""

    error_type = "weight_file_error"

    def __init__(self, message: str, offset: int, expected: Any = None, actual: Any = None):
        super().__init__(message, offset=offset, expected=expected, actual=actual)
        self.offset = offset
        self.expected = expected
        self.actual = actual

    def __str__(self) -> str:
        return f"{self.message} (at byte offset {self.offset})"


class ImageFormatError(BlazeError):
    """Unsupported or malformed image file."""

    error_type = "image_format_error"

    def __init__(self, message: str, offset: Optional[int] = None):
        super().__init__(message, offset=offset)
        self.offset = offset


class DatasetFormatError(BlazeError):
    """Malformed dataset index line."""

    error_type = "dataset_format_error"

    def __init__(self, message: str, line_number: Optional[int] = None):
        super().__init__(message, line_number=line_number)
        self.line_number = line_number

    def __str__(self) -> str:
        if self.line_number is None:
            return self.message
        return f"line {self.line_number}: {self.message}"


class DegenerateFaceError(BlazeError):
    """Face whose eye keypoints coincide."""

    error_type = "degenerate_face"


class EvaluationError(BlazeError):
    """Metric cannot be computed for the given inputs."""

    error_type = "evaluation_error"


class ConfigError(BlazeError):
    """Invalid runtime configuration."""

    error_type = "config_error"
