import pytest

from fwpd.model import RobotModel, RobotState
from fwpd.scenes import load_builtin_scene


@pytest.fixture
def model():
    return RobotModel()


@pytest.fixture
def tucked(model):
    return RobotState(joints=model.home_joints).clamped(model)


@pytest.fixture
def arena():
    return load_builtin_scene("fetchit_arena")


@pytest.fixture
def bin_scene():
    return load_builtin_scene("bin_table")
