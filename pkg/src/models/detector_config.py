"""Runtime configuration for the detector pipeline."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

from config.settings import (
    DEFAULT_JITTER_OFFSETS,
    DEFAULT_MIN_FACE_AREA,
    DEFAULT_MIN_SCORE,
)
from src.models.detection import TiePolicy
from src.models.errors import ConfigError


class CameraProfile(str, Enum):
    FRONTAL = "frontal"
    REAR = "rear"  # reserved


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds and policies for detect, jitter and eval."""
    min_score: float = DEFAULT_MIN_SCORE
    tie_policy: TiePolicy = field(default_factory=TiePolicy)
    jitter_offsets: Tuple[Tuple[int, int], ...] = DEFAULT_JITTER_OFFSETS
    camera: CameraProfile = CameraProfile.FRONTAL
    min_face_area: float = DEFAULT_MIN_FACE_AREA

    def __post_init__(self):
        if not 0.0 <= self.min_score <= 1.0:
            raise ConfigError(f"min_score must be in [0, 1], got {self.min_score}")
        if not 0.0 <= self.min_face_area <= 1.0:
            raise ConfigError(f"min_face_area must be in [0, 1], got {self.min_face_area}")
        if not self.jitter_offsets:
            raise ConfigError("At least one jitter offset is required")
        if any(offset == (0, 0) for offset in self.jitter_offsets):
            raise ConfigError("Jitter offsets must not include (0, 0)")
        if CameraProfile(self.camera) != CameraProfile.FRONTAL:
            raise ConfigError(f"Camera profile '{CameraProfile(self.camera).value}' is not supported; "
                              "only the frontal model is available")
