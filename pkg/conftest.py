import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root directory to Python's path
root_dir = Path(__file__).parent
sys.path.insert(0, str(root_dir))


@pytest.fixture
def rng():
    """Seeded generator so randomized tests are reproducible"""
    return np.random.default_rng(1234)
