"""Parser for dataset index files listing images and annotated faces.

One image per line:

    path/to/image.ppm xmin ymin xmax ymax kx1 ky1 ... kx6 ky6 ; xmin ymin ...

Coordinates are normalized to [0, 1]. Faces are separated by ';'. An image with
no faces is just the path. Blank lines and lines starting with '#' are skipped.
Relative image paths are resolved against the index file's directory.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

from config.settings import DATASET_COMMENT_CHAR, DATASET_FACE_SEPARATOR, NUM_KEYPOINTS
from src.models.detection import Face, GroundTruth
from src.models.errors import DatasetFormatError
from src.utils.logger import get_logger

logger = get_logger(__name__)

VALUES_PER_FACE = 4 + 2 * NUM_KEYPOINTS


@dataclass(frozen=True)
class DatasetEntry:
    image_path: Path
    truth: GroundTruth


def _parse_face(fields: List[str], line_number: int) -> Face:
    if len(fields) != VALUES_PER_FACE:
        raise DatasetFormatError(f"Face needs {VALUES_PER_FACE} values, got {len(fields)}",
                                 line_number=line_number)
    try:
        values = [float(v) for v in fields]
    except ValueError as e:
        raise DatasetFormatError(f"Non-numeric face value: {e}", line_number=line_number) from None

    keypoints = tuple((values[4 + 2 * i], values[5 + 2 * i]) for i in range(NUM_KEYPOINTS))
    try:
        return Face(box=tuple(values[:4]), keypoints=keypoints)
    except ValueError as e:
        raise DatasetFormatError(str(e), line_number=line_number) from None


def parse_index_line(line: str, line_number: int, base_dir: Path) -> DatasetEntry:
    """Parse one non-comment line."""
    head, *rest = line.split(DATASET_FACE_SEPARATOR)
    tokens = head.split()
    if not tokens:
        raise DatasetFormatError("Missing image path", line_number=line_number)

    image_path = Path(tokens[0])
    if not image_path.is_absolute():
        image_path = base_dir / image_path

    chunks = ([tokens[1:]] if len(tokens) > 1 else []) + [chunk.split() for chunk in rest]
    faces: Tuple[Face, ...] = tuple(_parse_face(chunk, line_number) for chunk in chunks)
    return DatasetEntry(image_path=image_path, truth=GroundTruth(image_id=tokens[0], faces=faces))


def load_dataset_index(path: Path) -> List[DatasetEntry]:
    """
    Read a dataset index file.

    Args:
        path: index file

    Returns:
        Entries in file order

    Raises:
        DatasetFormatError: malformed or duplicate line, with its line number
    """
    path = Path(path)
    entries: List[DatasetEntry] = []
    seen = set()
    with open(path, "r", encoding="utf-8") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith(DATASET_COMMENT_CHAR):
                continue
            entry = parse_index_line(line, line_number, path.parent)
            if entry.truth.image_id in seen:
                raise DatasetFormatError(f"Duplicate image '{entry.truth.image_id}'", line_number=line_number)
            seen.add(entry.truth.image_id)
            entries.append(entry)

    logger.info(f"Loaded {len(entries)} images with "
                f"{sum(len(e.truth.faces) for e in entries)} faces from {path}")
    return entries
