"""Pytest configuration and shared fixtures."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the path for `src` and `config` imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.models.network import blazeface_frontal_spec  # noqa: E402
from src.models.tensor import Tensor  # noqa: E402
from src.models.weights import init_random_weights  # noqa: E402
from src.parsers.ppm_reader import encode_ppm  # noqa: E402


@pytest.fixture(autouse=True)
def setup_logging():
    # Ensure logging is configured if needed
    import src.utils.logger as _log
    _log.setup_logging(verbose=False)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def frontal_spec():
    return blazeface_frontal_spec()


@pytest.fixture(scope="session")
def random_weights(frontal_spec):
    """Seeded Glorot weights for the frontal network."""
    return init_random_weights(frontal_spec, seed=7)


@pytest.fixture
def random_image(rng):
    """1x128x128x3 input with values in [-1, 1]."""
    return Tensor(rng.uniform(-1.0, 1.0, size=(1, 128, 128, 3)))


@pytest.fixture
def write_ppm(tmp_path):
    """Factory writing an H x W x 3 uint8 array to a P6 file."""
    def _write(pixels, name="image.ppm"):
        path = tmp_path / name
        path.write_bytes(encode_ppm(np.asarray(pixels, dtype=np.uint8)))
        return path
    return _write
