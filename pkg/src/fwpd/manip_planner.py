"""Joint-space manipulation planning: collision-aware IK goals, RRT-Connect
with shortcut smoothing, waypoint-dense paths, and ghost-preview sampling.

Everything here is a pure function of its inputs; the per-plan rng seed
fully determines the result (the planner budget is a node count, not a
wall clock, so identical inputs give identical plans)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kinematics
from .kinematics import ArmPlaneObstacle, arm_collides_batch, displacement_bound
from .model import RobotModel, RobotState, Scene
from .nav_planner import PlanFailure

RRT_STEP = 0.1             # rad, extension step (inf-norm)
NODE_CAP = 5000            # deterministic planner budget per segment
SHORTCUT_ATTEMPTS = 100
STEP_MAX = 0.05            # rad, max per-joint delta between path states
EDGE_RES = 0.01            # rad, collision sampling along candidate edges
GOAL_SEED_ATTEMPTS = 10    # IK retries hunting a collision-free goal
GHOST_DT = 0.05            # s
GRIPPER_RATE = 1.0         # aperture fraction per second during execution

JointPath = list[tuple[float, ...]]


@dataclass
class ManipSegment:
    start_joints: tuple[float, ...]
    end_joints: tuple[float, ...]
    path: JointPath
    terminal_gripper: Optional[float] = None


@dataclass
class ManipPlan:
    segments: list[ManipSegment]
    ghost: list[RobotState] = field(default_factory=list)


class _Collision:
    """Edge validity oracle with a Lipschitz safety margin.

    Samples spaced s apart (inf-norm) are checked with the capsule radius
    inflated by displacement_bound * s / 2, so a clean edge is collision
    free at every intermediate configuration, not just at the samples."""

    def __init__(self, model: RobotModel, torso_height: float,
                 obstacles: Sequence[ArmPlaneObstacle]):
        self.model = model
        self.torso = torso_height
        self.obstacles = obstacles
        self.margin = displacement_bound(model) * EDGE_RES / 2.0

    def state_blocked(self, q: np.ndarray, *, margin: Optional[float] = None) -> bool:
        m = self.margin if margin is None else margin
        return bool(
            arm_collides_batch(
                self.model, q[None, :], self.torso, self.obstacles, margin=m
            )[0]
        )

    def edge_blocked(self, a: np.ndarray, b: np.ndarray) -> bool:
        span = float(np.max(np.abs(b - a))) if len(a) else 0.0
        n = max(1, int(math.ceil(span / EDGE_RES)))
        ts = np.linspace(0.0, 1.0, n + 1)
        samples = a[None, :] + ts[:, None] * (b - a)[None, :]
        return bool(
            arm_collides_batch(
                self.model, samples, self.torso, self.obstacles, margin=self.margin
            ).any()
        )


def _rrt_connect(start: np.ndarray, goal: np.ndarray, model: RobotModel,
                 col: _Collision, rng: np.random.Generator,
                 *, step: float = RRT_STEP, node_cap: int = NODE_CAP,
                 goal_bias: float = 0.05) -> Optional[list[np.ndarray]]:
    n = len(start)
    lo = np.array([l for l, _ in model.joint_limits])
    hi = np.array([h for _, h in model.joint_limits])

    nodes_a, parents_a = [start], [-1]
    nodes_b, parents_b = [goal], [-1]

    def nearest(nodes: list[np.ndarray], q: np.ndarray) -> int:
        arr = np.asarray(nodes)
        return int(np.argmin(np.linalg.norm(arr - q, axis=1)))

    def steer(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
        span = float(np.max(np.abs(dst - src)))
        if span <= step:
            return dst.copy()
        return src + (dst - src) * (step / span)

    def extend(nodes, parents, q_target) -> Optional[int]:
        i = nearest(nodes, q_target)
        q_new = steer(nodes[i], q_target)
        if col.edge_blocked(nodes[i], q_new):
            return None
        nodes.append(q_new)
        parents.append(i)
        return len(nodes) - 1

    def connect(nodes, parents, q_target) -> Optional[int]:
        last = None
        while len(nodes_a) + len(nodes_b) < node_cap:
            idx = extend(nodes, parents, q_target)
            if idx is None:
                return last
            last = idx
            if np.max(np.abs(nodes[idx] - q_target)) < 1e-9:
                return idx
        return None

    def backtrack(nodes, parents, idx) -> list[np.ndarray]:
        out = []
        while idx != -1:
            out.append(nodes[idx])
            idx = parents[idx]
        out.reverse()
        return out

    a_is_start = True
    while len(nodes_a) + len(nodes_b) < node_cap:
        root_other = nodes_b[0]
        q_rand = (
            root_other.copy()
            if rng.random() < goal_bias
            else rng.uniform(lo, hi, size=n)
        )
        new_idx = extend(nodes_a, parents_a, q_rand)
        if new_idx is not None:
            q_new = nodes_a[new_idx]
            b_idx = connect(nodes_b, parents_b, q_new)
            if b_idx is not None and np.max(np.abs(nodes_b[b_idx] - q_new)) < 1e-9:
                path_a = backtrack(nodes_a, parents_a, new_idx)
                path_b = backtrack(nodes_b, parents_b, b_idx)
                path_b.reverse()
                full = path_a + path_b[1:]
                if not a_is_start:
                    full.reverse()
                return full
        nodes_a, nodes_b = nodes_b, nodes_a
        parents_a, parents_b = parents_b, parents_a
        a_is_start = not a_is_start
    return None


def _shortcut(path: list[np.ndarray], col: _Collision,
              rng: np.random.Generator,
              attempts: int = SHORTCUT_ATTEMPTS) -> list[np.ndarray]:
    if len(path) < 3:
        return path
    path = list(path)
    for _ in range(attempts):
        if len(path) < 3:
            break
        i = int(rng.integers(0, len(path) - 2))
        j = int(rng.integers(i + 2, len(path)))
        if not col.edge_blocked(path[i], path[j]):
            path = path[: i + 1] + path[j:]
    return path


def _densify(path: list[np.ndarray], step_max: float = STEP_MAX) -> JointPath:
    out: list[tuple[float, ...]] = [tuple(float(v) for v in path[0])]
    for a, b in zip(path, path[1:]):
        span = float(np.max(np.abs(b - a)))
        if span < 1e-12:
            continue
        n = max(1, int(math.ceil(span / step_max)))
        for i in range(1, n + 1):
            q = a + (b - a) * (i / n)
            out.append(tuple(float(v) for v in q))
    return out


def plan_manipulation(
    model: RobotModel,
    state: RobotState,
    scene: Scene,
    waypoints: Sequence,
    rng_seed,
    *,
    node_cap: int = NODE_CAP,
) -> ManipPlan | PlanFailure:
    """Plan through manipulation waypoints in label order.

    Each leg solves IK seeded by the previous end configuration (retrying
    restarts until the goal clears obstacles), then grows RRT-Connect in
    joint space. Failure reports the 1-based label of the first waypoint
    that could not be planned."""
    if not waypoints:
        raise ValueError("waypoints must be nonempty")
    obstacles = kinematics.slice_scene(scene, state.base_pose, model)
    col = _Collision(model, state.torso_height, obstacles)
    seeds = np.random.SeedSequence(rng_seed).spawn(len(waypoints))

    lo = np.array([l for l, _ in model.joint_limits])
    hi = np.array([h for _, h in model.joint_limits])
    prev = np.asarray(state.joints, dtype=float)
    segments: list[ManipSegment] = []

    for k, wp in enumerate(waypoints, start=1):
        ik_seed, goal_seed, rrt_seed, cut_seed = seeds[k - 1].spawn(4)
        ik_tries = ik_seed.spawn(GOAL_SEED_ATTEMPTS)
        goal_rng = np.random.default_rng(goal_seed)
        goal = None
        for attempt in range(GOAL_SEED_ATTEMPTS):
            seed_q = prev if attempt == 0 else goal_rng.uniform(lo, hi)
            sol = kinematics.ik(
                model, wp.target, state.torso_height, seed_q, ik_tries[attempt]
            )
            if sol is None:
                if attempt == 0:
                    return PlanFailure(label=k, reason="IkUnreachable")
                continue
            if not col.state_blocked(sol):
                goal = sol
                break
        if goal is None:
            # reachable, but every goal configuration found collides
            return PlanFailure(label=k, reason="PlanTimeout")

        if np.max(np.abs(goal - prev)) < 1e-12:
            path = [prev.copy()]
        else:
            if col.state_blocked(prev):
                return PlanFailure(label=k, reason="PlanTimeout")
            raw = _rrt_connect(
                prev, goal, model, col,
                rng=np.random.default_rng(rrt_seed), node_cap=node_cap,
            )
            if raw is None:
                return PlanFailure(label=k, reason="PlanTimeout")
            path = _shortcut(raw, col, np.random.default_rng(cut_seed))
        dense = _densify(path)

        gripper = getattr(wp, "gripper_command", None)
        segments.append(
            ManipSegment(
                start_joints=dense[0],
                end_joints=dense[-1],
                path=dense,
                terminal_gripper=gripper,
            )
        )
        prev = np.asarray(dense[-1], dtype=float)

    _assert_plan_valid(model, col, segments)
    plan = ManipPlan(segments=segments)
    plan.ghost = sample_ghost(model, state, plan)
    return plan


def _assert_plan_valid(model: RobotModel, col: _Collision,
                       segments: list[ManipSegment]) -> None:
    """Exhaustive output check: limits respected, every state collision free."""
    lo = np.array([l for l, _ in model.joint_limits])
    hi = np.array([h for _, h in model.joint_limits])
    for seg in segments:
        arr = np.asarray(seg.path)
        assert (arr >= lo - 1e-12).all() and (arr <= hi + 1e-12).all()
        blocked = arm_collides_batch(model, arr, col.torso, col.obstacles)
        assert not blocked.any()


def sample_ghost(model: RobotModel, state: RobotState, plan: ManipPlan,
                 dt: float = GHOST_DT) -> list[RobotState]:
    """Preview states along the plan at joint_max_speed, sampled every dt.

    The ghost's gripper value flips instantaneously at segment boundaries
    that carry a command; the first sample is the live state and the last
    is the final waypoint configuration."""
    legs: list[tuple[float, np.ndarray, np.ndarray]] = []  # duration, a, b
    boundaries: list[tuple[float, float]] = []              # time, gripper value
    t = 0.0
    for seg in plan.segments:
        for a, b in zip(seg.path, seg.path[1:]):
            a_arr, b_arr = np.asarray(a), np.asarray(b)
            dur = float(np.max(np.abs(b_arr - a_arr))) / model.joint_max_speed
            if dur > 0.0:
                legs.append((dur, a_arr, b_arr))
                t += dur
        if seg.terminal_gripper is not None:
            boundaries.append((t, seg.terminal_gripper))

    total = t
    n = int(math.floor(total / dt + 1e-9))
    times = [min(i * dt, total) for i in range(n + 1)]
    if times[-1] < total - 1e-12:
        times.append(total)

    samples: list[RobotState] = []
    leg_idx = 0
    leg_start_t = 0.0
    gripper = state.gripper_aperture
    b_idx = 0
    final_joints = plan.segments[-1].path[-1] if plan.segments else state.joints
    for tt in times:
        while leg_idx < len(legs) and tt > leg_start_t + legs[leg_idx][0] + 1e-12:
            leg_start_t += legs[leg_idx][0]
            leg_idx += 1
        if leg_idx < len(legs):
            dur, a, b = legs[leg_idx]
            frac = min(1.0, max(0.0, (tt - leg_start_t) / dur))
            joints = tuple(float(v) for v in a + frac * (b - a))
        else:
            joints = tuple(float(v) for v in final_joints)
        while b_idx < len(boundaries) and tt >= boundaries[b_idx][0] - 1e-12:
            gripper = boundaries[b_idx][1]
            b_idx += 1
        ghost = state.copy()
        ghost.joints = joints
        ghost.gripper_aperture = gripper
        samples.append(ghost)
    return samples
