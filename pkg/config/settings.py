"""Configuration settings for the BlazeFace desk stack."""

from pathlib import Path

# Base directories
# Resolve project root two levels up from this file
BASE_DIR = Path(__file__).resolve().parent.parent

LOG_DIR = BASE_DIR / "logs"

# Create directories if they don't exist
for dir_path in [LOG_DIR]:
    dir_path.mkdir(exist_ok=True, parents=True)

# Network input
INPUT_SIZE = 128
INPUT_CHANNELS = 3
DEPTHWISE_KERNEL = 5
DOUBLE_BLOCK_MID_CHANNELS = 24

# Head layout: 1 score + 4 box + 6 keypoints * 2
NUM_KEYPOINTS = 6
OUTPUTS_PER_ANCHOR = 1 + 4 + 2 * NUM_KEYPOINTS
ANCHORS_MAP16 = 2
ANCHORS_MAP8 = 6

# Anchor decoding
REGRESSION_SCALE = 128.0
ANCHOR_SIZE = 1.0
LOGIT_CLAMP = 80.0

# Detection / tie resolution
DEFAULT_MIN_SCORE = 0.5
DEFAULT_CLUSTER_IOU = 0.3

# Rotated face region for downstream models
ROI_SCALE = 1.5
ROI_SIZE = 128

# Evaluation
EVAL_MATCH_IOU = 0.5
JITTER_MATCH_IOU = 0.3
DEFAULT_MIN_FACE_AREA = 0.0
DEFAULT_JITTER_OFFSETS = (
    (-1, -1), (0, -1), (1, -1),
    (-1, 0), (1, 0),
    (-1, 1), (0, 1), (1, 1),
    (-2, 0), (2, 0), (0, -2), (0, 2),
)
DATASET_COMMENT_CHAR = "#"
DATASET_FACE_SEPARATOR = ";"

# Weight file format
WEIGHT_MAGIC = b"BLZW"
WEIGHT_FORMAT_VERSION = 1

# Image decoding
PPM_MAGIC = b"P6"
PPM_MAX_VALUE = 255

# Analysis
DEFAULT_TIMING_ITERATIONS = 10
DEFAULT_RANDOM_SEED = 0

# Logging
LOG_FILENAME = "blazeface_errors.log"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Error handling
CONTINUE_ON_ERROR = True
