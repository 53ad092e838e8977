from pathlib import Path

import pytest

from leias.config import config_from_json_dict

FIXTURES = Path(__file__).parent / "fixtures"


def scenario(**overrides):
    """A small valid scenario dict; callers override what they test."""
    base = {
        "waypoints": [[0, 0], [100, 0]],
        "tick_hz": 1,
        "thresholds": {"t1": 3, "t2": 9, "t3": 15},
        "error_schedule": {
            "gps": {"kind": "none"},
            "lidar": {"kind": "none"},
            "imu": {"kind": "none"},
        },
        "pilot_model": {"kind": "table"},
        "selection_policy": {"kind": "annealing"},
        "response_window_s": 5,
        "seed": 42,
    }
    base.update(overrides)
    return base


def make_config(**overrides):
    return config_from_json_dict(scenario(**overrides))


@pytest.fixture
def fixtures_dir():
    return FIXTURES
