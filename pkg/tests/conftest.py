import sys
from pathlib import Path

try:
    import cmtheta  # noqa: F401
except ImportError:  # running from a bare checkout without installation
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np
import pytest

from cmtheta.lattice import Lattice


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def default_lattice():
    return Lattice.default()


@pytest.fixture(scope="session")
def square_lattice():
    return Lattice.square()
