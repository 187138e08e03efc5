import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from linegom.engine import default_bundle

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def bundle():
    """Seeded test-size net plus its baked codebook; one bake per session."""
    return default_bundle()


@pytest.fixture(scope="session")
def mapping_weights(bundle):
    return bundle[0]


@pytest.fixture(scope="session")
def head_weights(bundle):
    return bundle[1]


@pytest.fixture(scope="session")
def codebook(bundle):
    return bundle[2]


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR
