import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from closure.models import OUSpec
from model.models import ModelParams, RescaleConstants
from tests.helpers import random_spd


@pytest.fixture
def params():
    """Small calibrated two-scale model with non-trivial rescale constants."""
    return ModelParams(
        n_x=6, j=3, eps=0.01, f_x=6.0, f_y=8.0, lambda_x=0.3, lambda_y=0.3,
        rescale_x=RescaleConstants(mean=1.9, beta=3.1),
        rescale_y=RescaleConstants(mean=2.3, beta=3.6),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ou_spec():
    gamma = random_spd(4, seed=3, max_condition=5.0)
    return OUSpec(gamma=gamma, m=np.zeros(4), sigma_noise=np.eye(4),
                  l_x=np.ones((4, 2)), x=np.zeros(2), dt=1e-3, seed=11)
