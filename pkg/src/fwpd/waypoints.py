"""Waypoint-list operations: create, duplicate-after, remove-last, move,
per-waypoint state commands, and pre-check coloring.

Labels are positions: the waypoint stored at index i is displayed as i+1.
Identity lives in the id, which never changes once assigned."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .kinematics import target_in_reach
from .model import (
    ArmTarget,
    BadPosition,
    ColorState,
    KindMismatch,
    ManipulationWaypoint,
    NavigationWaypoint,
    PlacementBlocked,
    RobotModel,
    RobotState,
    Scene,
    Waypoint,
    WaypointList,
    clamp,
)
from .nav_planner import pose_collides


@dataclass
class ListContext:
    """Everything the pre-checks need: robot description, live state, scene."""

    model: RobotModel
    scene: Scene
    robot: RobotState


@dataclass(frozen=True)
class SetGripper:
    value: float


@dataclass(frozen=True)
class SetHeight:
    value: float


@dataclass(frozen=True)
class SetCollisionToggle:
    on: bool


StateCommand = Union[SetGripper, SetHeight, SetCollisionToggle]


def precheck_color(ctx: ListContext, wp: Waypoint) -> ColorState:
    """Pre-check color: Warning on a failed placement/reach check, else
    Default. Planner Error states are applied separately and cleared by
    any mutation of the waypoint."""
    if isinstance(wp, ManipulationWaypoint):
        ok = target_in_reach(ctx.model, ctx.robot, wp.target)
        return ColorState.DEFAULT if ok else ColorState.WARNING
    colliding = pose_collides(ctx.scene, ctx.model, wp.pose)
    return ColorState.WARNING if colliding else ColorState.DEFAULT


def _sanitize(ctx: ListContext, wp: Waypoint) -> Waypoint:
    if isinstance(wp, ManipulationWaypoint):
        g = wp.gripper_command
        target = replace(wp.target, d=max(0.0, wp.target.d))
        return replace(
            wp,
            target=target,
            gripper_command=None if g is None else clamp(g, 0.0, 1.0),
        )
    h = wp.height_command
    return replace(
        wp,
        height_command=None if h is None else clamp(h, *ctx.model.torso_range),
    )


def create_waypoint(
    ctx: ListContext,
    wlist: WaypointList,
    payload: Waypoint,
    new_id: int,
    insert_after: Optional[int] = None,
) -> int:
    """Insert a copy of payload at the end (or right after position
    insert_after, 1-based) and run its pre-check."""
    if payload.kind is not wlist.kind:
        raise KindMismatch(
            f"{payload.kind.value} waypoint cannot join a {wlist.kind.value} list"
        )
    if insert_after is not None and not 1 <= insert_after <= len(wlist.items):
        raise BadPosition(f"insert_after {insert_after} out of range 1..{len(wlist.items)}")
    wp = _sanitize(ctx, replace(payload, id=new_id))
    wp.color_state = precheck_color(ctx, wp)
    if insert_after is None:
        wlist.items.append(wp)
    else:
        wlist.items.insert(insert_after, wp)
    return new_id


def duplicate_after(ctx: ListContext, wlist: WaypointList, source_id: int,
                    new_id: int) -> int:
    """Copy a waypoint and insert the copy immediately after it."""
    pos = wlist.label_of(source_id)
    src = wlist.find(source_id)
    return create_waypoint(ctx, wlist, replace(src), new_id, insert_after=pos)


def remove_last(wlist: WaypointList) -> Optional[int]:
    """Drop the last waypoint; None when the list is already empty."""
    if not wlist.items:
        return None
    return wlist.items.pop().id


def move_waypoint(
    ctx: ListContext,
    wlist: WaypointList,
    wid: int,
    new_target: Union[ArmTarget, tuple[float, float, float]],
) -> ColorState:
    """Update a waypoint's pose and re-run its pre-check.

    Navigation waypoints with the collision toggle on refuse poses whose
    footprint collides with the scene (the waypoint keeps its old pose)."""
    wp = wlist.find(wid)
    if isinstance(wp, ManipulationWaypoint):
        if not isinstance(new_target, ArmTarget):
            raise KindMismatch("manipulation waypoints move to an ArmTarget")
        wp.target = replace(new_target, d=max(0.0, new_target.d))
    else:
        if isinstance(new_target, ArmTarget):
            raise KindMismatch("navigation waypoints move to an (x, y, heading) pose")
        pose = (float(new_target[0]), float(new_target[1]), float(new_target[2]))
        if wp.collision_toggle and pose_collides(ctx.scene, ctx.model, pose):
            raise PlacementBlocked("footprint collides with the preloaded scene")
        wp.pose = pose
    wp.color_state = precheck_color(ctx, wp)
    return wp.color_state


def set_waypoint_state(ctx: ListContext, wlist: WaypointList, wid: int,
                       command: StateCommand) -> None:
    """Store a per-waypoint state command, clamped to the legal interval."""
    wp = wlist.find(wid)
    if isinstance(command, SetGripper):
        if not isinstance(wp, ManipulationWaypoint):
            raise KindMismatch("gripper commands belong to manipulation waypoints")
        wp.gripper_command = clamp(command.value, 0.0, 1.0)
    elif isinstance(command, SetHeight):
        if not isinstance(wp, NavigationWaypoint):
            raise KindMismatch("height commands belong to navigation waypoints")
        wp.height_command = clamp(command.value, *ctx.model.torso_range)
    elif isinstance(command, SetCollisionToggle):
        if not isinstance(wp, NavigationWaypoint):
            raise KindMismatch("the collision toggle belongs to navigation waypoints")
        wp.collision_toggle = bool(command.on)
    else:
        raise KindMismatch(f"unknown state command {command!r}")
    wp.color_state = precheck_color(ctx, wp)


def refresh_colors(ctx: ListContext, wlist: WaypointList) -> None:
    """Recompute every pre-check color (idempotent; keeps Error states)."""
    for wp in wlist.items:
        if wp.color_state is not ColorState.ERROR:
            wp.color_state = precheck_color(ctx, wp)


def mark_plan_failure(wlist: WaypointList, label: int) -> Optional[int]:
    """Recolor the waypoint at 1-based `label` red; returns its id."""
    if 1 <= label <= len(wlist.items):
        wp = wlist.items[label - 1]
        wp.color_state = ColorState.ERROR
        return wp.id
    return None
