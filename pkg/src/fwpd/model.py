"""Domain types: robot description, robot state, waypoints, scenes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union


class ColorState(Enum):
    """Per-waypoint visual status."""

    DEFAULT = "default"    # plannable
    WARNING = "warning"    # pre-check failed (out of reach / colliding placement)
    ERROR = "error"        # last planning attempt failed at this waypoint


class WaypointKind(Enum):
    MANIPULATION = "manipulation"
    NAVIGATION = "navigation"


class OperationError(Exception):
    """Base for rejected operations; `code` is the wire error code."""

    code = "error"


class KindMismatch(OperationError):
    code = "kind_mismatch"


class BadPosition(OperationError):
    code = "bad_position"


class NotFound(OperationError):
    code = "not_found"


class PlacementBlocked(OperationError):
    code = "placement_blocked"


class Busy(OperationError):
    code = "busy"


class BadState(OperationError):
    code = "bad_state"


class EmptyList(OperationError):
    code = "empty_list"


class SceneError(ValueError):
    """Scene file failed validation; message carries the field path."""


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass
class RobotModel:
    """Kinematic description of the simulated mobile manipulator.

    The arm is a planar revolute chain operating in the vertical plane
    through the base center along the base heading. All lengths in meters,
    angles in radians, speeds per second.
    """

    base_radius: float = 0.30
    torso_base_height: float = 0.70        # shoulder z with torso fully retracted
    torso_range: tuple[float, float] = (0.0, 0.40)
    shoulder_forward_offset: float = 0.10
    link_lengths: tuple[float, ...] = (0.35, 0.30, 0.15)
    joint_limits: tuple[tuple[float, float], ...] = ()
    link_radius: float = 0.03
    gripper_max_opening: float = 0.10
    head_pan_limits: tuple[float, float] = (-1.57, 1.57)
    head_tilt_limits: tuple[float, float] = (-0.8, 0.8)
    base_max_speed: float = 0.5
    base_max_turn_rate: float = 1.0
    joint_max_speed: float = 0.5
    torso_max_speed: float = 0.1
    home_joints: tuple[float, ...] = ()   # tucked start pose, clear of furniture

    def __post_init__(self) -> None:
        if not self.joint_limits:
            lim = math.radians(170.0)
            self.joint_limits = tuple((-lim, lim) for _ in self.link_lengths)
        if not self.home_joints:
            if len(self.link_lengths) == 3:
                self.home_joints = (2.2, -2.9, 2.2)
            else:
                self.home_joints = tuple(0.0 for _ in self.link_lengths)
        if len(self.home_joints) != len(self.link_lengths):
            raise ValueError("home_joints must match link_lengths in length")
        if len(self.joint_limits) != len(self.link_lengths):
            raise ValueError("joint_limits must match link_lengths in length")
        if any(l <= 0 for l in self.link_lengths):
            raise ValueError("link lengths must be positive")
        if self.base_radius <= 0 or self.link_radius <= 0:
            raise ValueError("radii must be positive")
        if self.torso_range[0] > self.torso_range[1]:
            raise ValueError("torso_range empty")
        if any(lo > hi for lo, hi in self.joint_limits):
            raise ValueError("joint limit interval empty")

    @property
    def reach(self) -> float:
        return sum(self.link_lengths)

    def shoulder_height(self, torso_height: float) -> float:
        return self.torso_base_height + torso_height

    @property
    def max_height(self) -> float:
        """Conservative z extent of the robot body, torso fully raised."""
        return self.torso_base_height + self.torso_range[1]


@dataclass
class RobotState:
    """Live configuration; values are clamped to model intervals on write."""

    base_pose: tuple[float, float, float] = (0.0, 0.0, 0.0)  # x, y, heading
    torso_height: float = 0.0
    joints: tuple[float, ...] = ()
    gripper_aperture: float = 1.0   # 0 closed .. 1 fully open
    head_pan: float = 0.0
    head_tilt: float = 0.0

    def clamped(self, model: RobotModel) -> RobotState:
        joints = self.joints or tuple(0.0 for _ in model.link_lengths)
        joints = tuple(
            clamp(q, lo, hi) for q, (lo, hi) in zip(joints, model.joint_limits)
        )
        return replace(
            self,
            joints=joints,
            torso_height=clamp(self.torso_height, *model.torso_range),
            gripper_aperture=clamp(self.gripper_aperture, 0.0, 1.0),
            head_pan=clamp(self.head_pan, *model.head_pan_limits),
            head_tilt=clamp(self.head_tilt, *model.head_tilt_limits),
        )

    def copy(self) -> RobotState:
        return replace(self)


@dataclass
class ArmTarget:
    """End-effector goal in arm-plane coordinates.

    d: forward distance from the shoulder along the base heading;
    z: world height; pitch: effector orientation in the arm plane.
    Operator-placed targets keep d >= 0 (enforced where targets enter a
    waypoint list); fk() may report d < 0 for folded configurations.
    """

    d: float
    z: float
    pitch: float = 0.0


@dataclass
class ManipulationWaypoint:
    id: int
    target: ArmTarget
    gripper_command: Optional[float] = None   # aperture in [0, 1]
    color_state: ColorState = ColorState.DEFAULT

    kind = WaypointKind.MANIPULATION


@dataclass
class NavigationWaypoint:
    id: int
    pose: tuple[float, float, float]          # floor-locked x, y, heading
    height_command: Optional[float] = None    # torso height in torso_range
    collision_toggle: bool = True
    color_state: ColorState = ColorState.DEFAULT

    kind = WaypointKind.NAVIGATION


Waypoint = Union[ManipulationWaypoint, NavigationWaypoint]


@dataclass
class WaypointList:
    """Ordered waypoints of one kind; display labels are 1-based positions."""

    kind: WaypointKind
    items: list[Waypoint] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.items)

    def find(self, wid: int) -> Waypoint:
        for wp in self.items:
            if wp.id == wid:
                return wp
        raise NotFound(f"no waypoint with id {wid}")

    def label_of(self, wid: int) -> int:
        for i, wp in enumerate(self.items):
            if wp.id == wid:
                return i + 1
        raise NotFound(f"no waypoint with id {wid}")


@dataclass(frozen=True)
class Box:
    """Axis-aligned obstacle box."""

    x: tuple[float, float]
    y: tuple[float, float]
    z: tuple[float, float]
    label: str = ""


@dataclass(frozen=True)
class Scene:
    """Preloaded geometric world model used for pre-checks and planning."""

    name: str
    bounds_x: tuple[float, float]
    bounds_y: tuple[float, float]
    obstacles: tuple[Box, ...] = ()
    floor_z: float = 0.0

    def validate(self) -> None:
        if self.bounds_x[0] >= self.bounds_x[1] or self.bounds_y[0] >= self.bounds_y[1]:
            raise SceneError("bounds: empty rectangle")
        for i, box in enumerate(self.obstacles):
            for axis in ("x", "y", "z"):
                lo, hi = getattr(box, axis)
                if lo > hi:
                    raise SceneError(f"obstacles[{i}].{axis}: empty interval")
            if box.x[0] < self.bounds_x[0] or box.x[1] > self.bounds_x[1]:
                raise SceneError(f"obstacles[{i}].x: outside bounds")
            if box.y[0] < self.bounds_y[0] or box.y[1] > self.bounds_y[1]:
                raise SceneError(f"obstacles[{i}].y: outside bounds")
