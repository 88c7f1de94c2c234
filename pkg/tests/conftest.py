import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from modules.empirical import Sample1D, Sample2D  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo checks that take minutes")


@pytest.fixture
def line_sample():
    """Points on the exact line y = 2x"""
    return Sample2D([0.0, 1.0, 2.0], [0.0, 2.0, 4.0])


@pytest.fixture
def regression_sample():
    rng = np.random.default_rng(1234)
    x = rng.standard_normal(30)
    return Sample2D(x, 0.8 * x + rng.standard_normal(30))


@pytest.fixture
def normal_sample():
    rng = np.random.default_rng(99)
    return Sample1D(rng.standard_normal(40) + 0.3)
