import os
import tempfile

# Must be set before any module creates its Logger
os.environ.setdefault('LORASIM_LOG_FILE', os.path.join(tempfile.gettempdir(), 'lorasim-tests.log'))

import numpy as np
import pytest

from src.schemas.sim_schemas import SimConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_config():
    """A few bins on a small disk, fast enough for end-to-end sweeps."""
    return SimConfig(
        radius_km=6.0,
        gw_intensity=0.02,
        ed_intensity=0.5,
        bins=(0.5, 2.0, 4.5),
        trials=40,
        seed=7,
    )
