import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kpilab.analysis import random_band_limited_field
from kpilab.spectral import Grid


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(key=np.array([2024, 7], dtype=np.uint64)))


@pytest.fixture
def small_grid():
    return Grid(64, 16, 8.0 * math.pi, 1.0)


@pytest.fixture
def unit_grid():
    """2pi x 2pi box: integer x frequencies."""
    return Grid(64, 16, 2.0 * math.pi, 1.0)


@pytest.fixture
def soliton_grid():
    """Long box resolving Q_c tails to below 1e-12 of the peak."""
    return Grid(512, 16, 64.0 * math.pi, 1.0)


@pytest.fixture
def smooth_field(small_grid, rng):
    return random_band_limited_field(small_grid, rng, amplitude=0.8)
