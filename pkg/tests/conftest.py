import numpy as np
import pytest

from arena.utils import build_world
from models import AppConfig, ArenaSpec, RobotSpec


@pytest.fixture
def world():
    return build_world(ArenaSpec())


@pytest.fixture
def robot():
    return RobotSpec()


@pytest.fixture
def fast_robot():
    """Wheel limit high enough for the 0.1 m/s kinematics examples."""
    return RobotSpec(body_radius=0.03, axle_track=0.05, max_wheel_speed=0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_config():
    return AppConfig.model_validate({
        'trial': {'steps': 40, 'starts_per_trial': 2},
        'evolution': {'population_size': 10, 'generations': 3, 'parent_count': 4},
        'sweep': {'fov_values': [5.0, 45.0], 'replicates': 2, 'base_seed': 3},
    })
