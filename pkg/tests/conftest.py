import numpy as np
import pytest

from helpers import rect
from supframe.frames.gabor import GaborSystem
from supframe.frames.windows import make_window


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ola_hamming():
    """Periodic Hamming, 16 samples at 50% hop on Z_64: constant overlap-add."""
    return GaborSystem(make_window("hamming", 16, 64, periodic=True), 8, 16)


@pytest.fixture
def triangular():
    return GaborSystem(make_window("triangular", 16, 64), 8, 16)


@pytest.fixture
def rect_system():
    return GaborSystem(rect(8, 64), 8, 8)
