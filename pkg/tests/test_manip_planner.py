import math

import numpy as np
import pytest

from fwpd.kinematics import fk
from fwpd.manip_planner import (
    GHOST_DT,
    ManipPlan,
    ManipSegment,
    STEP_MAX,
    plan_manipulation,
    sample_ghost,
)
from fwpd.model import (
    ArmTarget,
    Box,
    ManipulationWaypoint,
    RobotModel,
    RobotState,
    Scene,
)
from fwpd.nav_planner import PlanFailure


def wp(d, z, pitch=0.0, gripper=None, wid=0):
    return ManipulationWaypoint(id=wid, target=ArmTarget(d, z, pitch),
                                gripper_command=gripper)


def grasp_waypoints():
    return [
        wp(0.30, 1.02, 0.0, wid=1),
        wp(0.42, 0.88, 0.0, gripper=1.0, wid=2),
        wp(0.52, 0.88, 0.0, wid=3),
        wp(0.52, 0.88, 0.0, gripper=0.3, wid=4),
    ]


from oracles import dense_recheck


# --------------------------------------------------------------- planning


def test_identity_goal_yields_zero_length_segment(model, tucked, bin_scene):
    target = fk(model, tucked.joints, tucked.torso_height)
    plan = plan_manipulation(model, tucked, bin_scene, [wp(target.d, target.z,
                                                           target.pitch, wid=1)], 0)
    assert isinstance(plan, ManipPlan)
    assert len(plan.segments) == 1
    seg = plan.segments[0]
    assert seg.path == [tuple(tucked.joints)]
    assert seg.start_joints == seg.end_joints


def test_waypoint_beyond_reach_fails_at_one(model, tucked, bin_scene):
    result = plan_manipulation(model, tucked, bin_scene,
                               [wp(model.reach + 0.5, 0.9, wid=1)], 0)
    assert result == PlanFailure(label=1, reason="IkUnreachable")


def test_failure_reports_first_bad_label(model, tucked, bin_scene):
    wps = [wp(0.30, 1.02, wid=1), wp(2.5, 0.9, wid=2), wp(0.30, 1.02, wid=3)]
    result = plan_manipulation(model, tucked, bin_scene, wps, 0)
    assert isinstance(result, PlanFailure)
    assert result.label == 2
    assert result.reason == "IkUnreachable"


def test_grasp_sequence_dense_recheck_clean(model, tucked, bin_scene):
    plan = plan_manipulation(model, tucked, bin_scene, grasp_waypoints(), 12345)
    assert isinstance(plan, ManipPlan)
    assert len(plan.segments) == 4
    assert dense_recheck(model, tucked, bin_scene, plan) == 0


def test_plan_chaining_and_endpoint_accuracy(model, tucked, bin_scene):
    plan = plan_manipulation(model, tucked, bin_scene, grasp_waypoints(), 99)
    assert isinstance(plan, ManipPlan)
    assert plan.segments[0].start_joints == tuple(tucked.joints)
    for prev, nxt in zip(plan.segments, plan.segments[1:]):
        assert nxt.start_joints == prev.end_joints
    for seg, w in zip(plan.segments, grasp_waypoints()):
        reached = fk(model, seg.end_joints, tucked.torso_height)
        assert math.hypot(reached.d - w.target.d, reached.z - w.target.z) <= 1e-3
        assert abs((reached.pitch - w.target.pitch + math.pi) % (2 * math.pi)
                   - math.pi) <= 1e-3


def test_path_step_and_limits(model, tucked, bin_scene):
    plan = plan_manipulation(model, tucked, bin_scene, grasp_waypoints(), 7)
    assert isinstance(plan, ManipPlan)
    for seg in plan.segments:
        assert seg.path[0] == seg.start_joints
        assert seg.path[-1] == seg.end_joints
        for a, b in zip(seg.path, seg.path[1:]):
            assert max(abs(x - y) for x, y in zip(a, b)) <= STEP_MAX + 1e-12
        for q in seg.path:
            assert all(l <= v <= h for v, (l, h) in zip(q, model.joint_limits))


def test_determinism_byte_identical(model, tucked, bin_scene):
    a = plan_manipulation(model, tucked, bin_scene, grasp_waypoints(), 2024)
    b = plan_manipulation(model, tucked, bin_scene, grasp_waypoints(), 2024)
    assert isinstance(a, ManipPlan) and isinstance(b, ManipPlan)
    assert [s.path for s in a.segments] == [s.path for s in b.segments]
    assert [s.terminal_gripper for s in a.segments] == [
        s.terminal_gripper for s in b.segments
    ]
    ga = [(s.joints, s.gripper_aperture) for s in a.ghost]
    gb = [(s.joints, s.gripper_aperture) for s in b.ghost]
    assert ga == gb


def test_different_seed_may_differ_but_stays_valid(model, tucked, bin_scene):
    for seed in (1, 2, 3):
        plan = plan_manipulation(model, tucked, bin_scene, grasp_waypoints(), seed)
        assert isinstance(plan, ManipPlan)
        assert dense_recheck(model, tucked, bin_scene, plan) == 0


def test_goal_in_obstacle_fails(model, tucked, bin_scene):
    # effector target buried inside the table surface
    result = plan_manipulation(model, tucked, bin_scene, [wp(0.6, 0.75, wid=1)], 0)
    assert isinstance(result, PlanFailure)
    assert result.reason == "PlanTimeout"


# ------------------------------------------------------------------ ghost


def test_ghost_zero_length_plan(model, tucked, bin_scene):
    target = fk(model, tucked.joints, tucked.torso_height)
    plan = plan_manipulation(model, tucked, bin_scene,
                             [wp(target.d, target.z, target.pitch, wid=1)], 0)
    assert isinstance(plan, ManipPlan)
    assert len(plan.ghost) == 1
    g = plan.ghost[0]
    assert g.joints == tuple(tucked.joints)
    assert g.gripper_aperture == tucked.gripper_aperture


def test_ghost_sample_count_arithmetic(model, tucked):
    # single leg of 1.0 rad inf-norm travel at 0.5 rad/s -> 2.0 s -> 41 samples
    q0 = tuple(tucked.joints)
    q1 = (q0[0] - 1.0, q0[1], q0[2])
    steps = 20
    path = [
        tuple(a + (b - a) * i / steps for a, b in zip(q0, q1))
        for i in range(steps + 1)
    ]
    seg = ManipSegment(start_joints=q0, end_joints=q1, path=path)
    plan = ManipPlan(segments=[seg])
    ghost = sample_ghost(model, tucked, plan, dt=GHOST_DT)
    assert len(ghost) == 41
    assert ghost[0].joints == pytest.approx(q0)
    assert ghost[-1].joints == pytest.approx(q1)


def test_ghost_gripper_switches_only_at_boundaries(model, bin_scene):
    state = RobotState(joints=RobotModel().home_joints,
                       gripper_aperture=0.6).clamped(model)
    plan = plan_manipulation(model, state, bin_scene, grasp_waypoints(), 5)
    assert isinstance(plan, ManipPlan)
    values = [g.gripper_aperture for g in plan.ghost]
    changes = [(a, b) for a, b in zip(values, values[1:]) if a != b]
    # exactly the commanded values appear, in order, with no intermediates
    assert changes == [(0.6, 1.0), (1.0, 0.3)]
    assert values[0] == 0.6
    assert values[-1] == 0.3


def test_ghost_first_and_last_states(model, tucked, bin_scene):
    plan = plan_manipulation(model, tucked, bin_scene, grasp_waypoints(), 5)
    assert isinstance(plan, ManipPlan)
    assert plan.ghost[0].joints == tuple(tucked.joints)
    assert plan.ghost[-1].joints == plan.segments[-1].end_joints
    assert plan.ghost[0].base_pose == tucked.base_pose
