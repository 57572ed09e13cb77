"""Planar-arm kinematics: FK, damped-least-squares IK, reach pre-check,
scene slicing into the arm plane, and capsule-vs-rectangle collision tests.

All operations are pure functions of their inputs; rng seeds are passed
explicitly so results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import ArmTarget, RobotModel, RobotState

IK_TOL_POS = 1e-3      # m
IK_TOL_ANG = 1e-3      # rad
IK_RESTARTS = 20
IK_ITERS = 200
IK_DAMPING = 0.05
# Shared reach comparison slack: sum(link_lengths) loses a few ulps, and the
# pre-check and the IK gate must agree on the same boundary.
REACH_EPS = 1e-9
# A lane that fails to improve its error by this much over this many
# iterations is abandoned (DLS has settled in a local minimum).
_STALL_WINDOW = 25
_STALL_EPS = 1e-9


@dataclass(frozen=True)
class ArmPlaneObstacle:
    """Obstacle rectangle in arm-plane (d, z) coordinates."""

    d: tuple[float, float]
    z: tuple[float, float]
    label: str = ""


def fk(model: RobotModel, joints: Sequence[float], torso_height: float) -> ArmTarget:
    """Effector pose of the cumulative-angle planar chain.

    The chain is rooted at the shoulder, (d=0, z=torso_base_height+torso).
    """
    lengths = np.asarray(model.link_lengths, dtype=float)
    cums = np.cumsum(np.asarray(joints, dtype=float))
    d = float(np.dot(lengths, np.cos(cums)))
    z = model.shoulder_height(torso_height) + float(np.dot(lengths, np.sin(cums)))
    return ArmTarget(d=d, z=z, pitch=float(cums[-1]) if len(cums) else 0.0)


def joint_points(
    model: RobotModel, joints: Sequence[float], torso_height: float
) -> np.ndarray:
    """(n+2, 2) array of (d, z): shoulder, each joint end, gripper tip.

    The gripper is modeled as a straight extension of the last link with
    length gripper_max_opening.
    """
    lengths = list(model.link_lengths) + [model.gripper_max_opening]
    cums = np.cumsum(np.asarray(joints, dtype=float))
    cums = np.append(cums, cums[-1])  # gripper shares the last link angle
    pts = np.zeros((len(lengths) + 1, 2))
    pts[0] = (0.0, model.shoulder_height(torso_height))
    steps = np.stack([np.asarray(lengths) * np.cos(cums),
                      np.asarray(lengths) * np.sin(cums)], axis=1)
    pts[1:] = pts[0] + np.cumsum(steps, axis=0)
    return pts


def displacement_bound(model: RobotModel) -> float:
    """Max arm-surface displacement (m) per radian of joint motion (inf-norm).

    Rotating joint i moves any downstream point by at most its chain
    distance to the tip; summing over joints bounds simultaneous motion.
    """
    lengths = list(model.link_lengths) + [model.gripper_max_opening]
    return float(sum(sum(lengths[i:]) for i in range(len(model.link_lengths))))


def _within_reach(model: RobotModel, torso_height: float, target: ArmTarget) -> bool:
    dz = target.z - model.shoulder_height(torso_height)
    return math.hypot(target.d, dz) <= model.reach + REACH_EPS


def target_in_reach(model: RobotModel, state: RobotState, target: ArmTarget) -> bool:
    """Distance-only pre-check: target within arm's length of the shoulder.

    Purely geometric; a True here can still fail IK (unreachable pitch).
    """
    return _within_reach(model, state.torso_height, target)


def _batched_fk(lengths: np.ndarray, q: np.ndarray, shoulder_z: float):
    """FK over a (R, n) batch of joint vectors -> d, z, pitch arrays (R,)."""
    cums = np.cumsum(q, axis=1)
    d = np.cos(cums) @ lengths
    z = shoulder_z + np.sin(cums) @ lengths
    return d, z, cums[:, -1], cums


def ik(
    model: RobotModel,
    target: ArmTarget,
    torso_height: float,
    seed_state: Sequence[float],
    rng_seed: int,
    *,
    restarts: int = IK_RESTARTS,
    iters: int = IK_ITERS,
    damping: float = IK_DAMPING,
) -> Optional[np.ndarray]:
    """Damped-least-squares IK; None when no solution is found.

    The seed plus `restarts` random configurations iterate as parallel
    lanes; the returned solution is the one the sequential
    seed-then-restarts order would find first. Targets beyond the
    reachable disc are refused outright, which also keeps the reach
    pre-check sound (OutOfReach implies no IK solution).
    """
    n = len(model.link_lengths)
    lengths = np.asarray(model.link_lengths, dtype=float)
    shoulder_z = model.shoulder_height(torso_height)
    if not _within_reach(model, torso_height, target):
        return None

    lo = np.array([l for l, _ in model.joint_limits])
    hi = np.array([h for _, h in model.joint_limits])
    rng = np.random.default_rng(rng_seed)
    q = np.empty((restarts + 1, n))
    q[0] = np.clip(np.asarray(seed_state, dtype=float), lo, hi)
    q[1:] = rng.uniform(lo, hi, size=(restarts, n))

    lam2 = damping * damping
    frozen = np.full(restarts + 1, False)
    dead = np.full(restarts + 1, False)
    solutions = np.zeros_like(q)
    best_err = np.full(restarts + 1, np.inf)
    last_gain = np.zeros(restarts + 1, dtype=int)

    for it in range(iters + 1):
        d, z, pitch, cums = _batched_fk(lengths, q, shoulder_z)
        dpitch = np.mod(target.pitch - pitch + np.pi, 2.0 * np.pi) - np.pi
        e = np.stack([target.d - d, target.z - z, dpitch], axis=1)
        pos_err = np.hypot(e[:, 0], e[:, 1])
        ang_err = np.abs(e[:, 2])

        hit = (pos_err <= IK_TOL_POS) & (ang_err <= IK_TOL_ANG) & ~frozen & ~dead
        solutions[hit] = q[hit]
        frozen |= hit

        err = pos_err + ang_err
        improved = err < best_err - _STALL_EPS
        best_err = np.minimum(best_err, err)
        last_gain[improved] = it
        dead |= (~frozen) & (it - last_gain > _STALL_WINDOW)

        resolved = frozen | dead
        done = resolved.all()
        if not done and frozen.any():
            first = int(np.argmax(frozen))
            done = resolved[:first].all()
        if done or it == iters:
            break

        # tip-down Jacobian columns via reversed cumulative sums
        live = ~resolved
        sin_l = lengths * np.sin(cums[live])
        cos_l = lengths * np.cos(cums[live])
        jx = -(np.cumsum(sin_l[:, ::-1], axis=1)[:, ::-1])
        jz = np.cumsum(cos_l[:, ::-1], axis=1)[:, ::-1]
        J = np.stack([jx, jz, np.ones_like(jx)], axis=1)  # (L, 3, n)
        A = J @ J.transpose(0, 2, 1) + lam2 * np.eye(3)
        y = np.linalg.solve(A, e[live, :, None])
        dq = (J.transpose(0, 2, 1) @ y)[:, :, 0]
        q[live] = np.clip(q[live] + dq, lo, hi)

    if not frozen.any():
        return None
    return solutions[int(np.argmax(frozen))].copy()


def slice_scene(scene, base_pose: tuple[float, float, float],
                model: RobotModel) -> list[ArmPlaneObstacle]:
    """Project scene boxes into the arm plane along the base heading.

    Returns, per box crossed by the heading ray from the base center, the
    interval of forward distances d (measured from the shoulder's ground
    projection) paired with the box z interval.
    """
    bx, by, heading = base_pose
    dx, dy = math.cos(heading), math.sin(heading)
    out: list[ArmPlaneObstacle] = []
    for box in scene.obstacles:
        t0, t1 = 0.0, math.inf
        ok = True
        for pos, dirc, (lo, hi) in ((bx, dx, box.x), (by, dy, box.y)):
            if abs(dirc) < 1e-12:
                if not (lo <= pos <= hi):
                    ok = False
                    break
            else:
                ta, tb = (lo - pos) / dirc, (hi - pos) / dirc
                if ta > tb:
                    ta, tb = tb, ta
                t0, t1 = max(t0, ta), min(t1, tb)
        if not ok or t0 > t1:
            continue
        off = model.shoulder_forward_offset
        out.append(ArmPlaneObstacle(d=(t0 - off, t1 - off), z=box.z, label=box.label))
    return out


def _segment_rect_distance(
    a: np.ndarray, b: np.ndarray, rlo: np.ndarray, rhi: np.ndarray
) -> np.ndarray:
    """Exact distance between segments and solid axis-aligned rectangles.

    a, b: (..., 2) segment endpoints; rlo, rhi: (..., 2) rectangle corners,
    broadcast together. Zero when a segment enters its rectangle.
    """
    a, b, rlo, rhi = np.broadcast_arrays(a, b, rlo, rhi)
    ab = b - a

    # Liang-Barsky clip of the segment against the rectangle slab-by-slab
    t0 = np.zeros(a.shape[:-1])
    t1 = np.ones(a.shape[:-1])
    inside = np.ones(a.shape[:-1], dtype=bool)
    for k in (0, 1):
        d = ab[..., k]
        parallel = np.abs(d) < 1e-15
        below = (a[..., k] < rlo[..., k]) | (a[..., k] > rhi[..., k])
        inside &= ~(parallel & below)
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (rlo[..., k] - a[..., k]) / d
            tb = (rhi[..., k] - a[..., k]) / d
        swap = ta > tb
        ta2 = np.where(swap, tb, ta)
        tb2 = np.where(swap, ta, tb)
        t0 = np.where(parallel, t0, np.maximum(t0, ta2))
        t1 = np.where(parallel, t1, np.minimum(t1, tb2))
    intersects = inside & (t0 <= t1)

    # Endpoint -> rectangle distances
    def point_rect(p):
        gap = np.maximum(np.maximum(rlo - p, p - rhi), 0.0)
        return np.hypot(gap[..., 0], gap[..., 1])

    # Corner -> segment distances
    len2 = np.einsum("...k,...k->...", ab, ab)
    corners = (
        rlo,
        np.stack([rhi[..., 0], rlo[..., 1]], axis=-1),
        rhi,
        np.stack([rlo[..., 0], rhi[..., 1]], axis=-1),
    )

    def corner_seg(c):
        ac = c - a
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.clip(np.einsum("...k,...k->...", ac, ab) / len2, 0.0, 1.0)
        t = np.where(len2 < 1e-30, 0.0, t)
        proj = a + t[..., None] * ab
        return np.hypot(c[..., 0] - proj[..., 0], c[..., 1] - proj[..., 1])

    dist = np.minimum(point_rect(a), point_rect(b))
    for c in corners:
        dist = np.minimum(dist, corner_seg(c))
    return np.where(intersects, 0.0, dist)


def arm_collides(
    model: RobotModel,
    joints: Sequence[float],
    torso_height: float,
    obstacles: Sequence[ArmPlaneObstacle],
    *,
    margin: float = 0.0,
) -> bool:
    """True when any link capsule (radius link_radius + margin) intersects
    any arm-plane obstacle rectangle. The gripper counts as an extension
    of the last link."""
    if not obstacles:
        return False
    q = np.asarray([joints], dtype=float)
    return bool(arm_collides_batch(model, q, torso_height, obstacles, margin=margin)[0])


def arm_collides_batch(
    model: RobotModel,
    joints: np.ndarray,
    torso_height: float,
    obstacles: Sequence[ArmPlaneObstacle],
    *,
    margin: float = 0.0,
) -> np.ndarray:
    """Vectorized arm_collides over a (N, n) batch -> (N,) bool array."""
    N = joints.shape[0]
    if not obstacles or N == 0:
        return np.zeros(N, dtype=bool)
    lengths = np.asarray(list(model.link_lengths) + [model.gripper_max_opening])
    cums = np.cumsum(joints, axis=1)
    cums = np.concatenate([cums, cums[:, -1:]], axis=1)     # (N, n+1)
    steps = np.stack([lengths * np.cos(cums), lengths * np.sin(cums)], axis=2)
    pts = np.zeros((N, len(lengths) + 1, 2))
    pts[:, 0, 1] = model.shoulder_height(torso_height)
    pts[:, 1:] = pts[:, :1] + np.cumsum(steps, axis=1)

    a = pts[:, :-1, None, :]                                # (N, L, 1, 2)
    b = pts[:, 1:, None, :]
    rlo = np.array([[o.d[0], o.z[0]] for o in obstacles])   # (K, 2)
    rhi = np.array([[o.d[1], o.z[1]] for o in obstacles])
    dist = _segment_rect_distance(a, b, rlo[None, None], rhi[None, None])
    return (dist <= model.link_radius + margin).any(axis=(1, 2))
