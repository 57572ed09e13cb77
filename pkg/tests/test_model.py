import math

import pytest

from fwpd.model import RobotModel, RobotState, Scene, SceneError, Box, clamp, wrap_angle


def test_model_defaults_consistent():
    m = RobotModel()
    assert m.reach == pytest.approx(0.80)
    assert len(m.joint_limits) == len(m.link_lengths) == len(m.home_joints)
    assert m.torso_range[0] <= m.torso_range[1]


def test_model_rejects_bad_geometry():
    with pytest.raises(ValueError):
        RobotModel(link_lengths=(0.3, -0.1))
    with pytest.raises(ValueError):
        RobotModel(torso_range=(0.5, 0.1))
    with pytest.raises(ValueError):
        RobotModel(joint_limits=((1.0, -1.0), (0, 0), (0, 0)))
    with pytest.raises(ValueError):
        RobotModel(joint_limits=((0, 1),))


def test_state_clamping():
    m = RobotModel()
    s = RobotState(joints=(9.0, -9.0, 0.1), torso_height=3.0,
                   gripper_aperture=1.7, head_pan=9.0).clamped(m)
    assert s.joints[0] == m.joint_limits[0][1]
    assert s.joints[1] == m.joint_limits[1][0]
    assert s.torso_height == m.torso_range[1]
    assert s.gripper_aperture == 1.0
    assert s.head_pan == m.head_pan_limits[1]


def test_wrap_angle():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.3 - 2 * math.pi) == pytest.approx(0.3)


def test_clamp():
    assert clamp(0.5, 0.0, 1.0) == 0.5
    assert clamp(-1.0, 0.0, 1.0) == 0.0
    assert clamp(2.0, 0.0, 1.0) == 1.0


def test_scene_validate_catches_out_of_bounds():
    scene = Scene(
        name="bad", bounds_x=(0, 1), bounds_y=(0, 1),
        obstacles=(Box(x=(0.5, 1.5), y=(0, 1), z=(0, 1)),),
    )
    with pytest.raises(SceneError, match="outside bounds"):
        scene.validate()
