"""Human-in-the-loop planning engine and kinematic simulator for
functional waypoints: waypoint sequences that carry per-waypoint state
commands, previewed as a ghost trajectory before approval."""

from .model import (
    ArmTarget,
    Box,
    ColorState,
    ManipulationWaypoint,
    NavigationWaypoint,
    RobotModel,
    RobotState,
    Scene,
    WaypointKind,
    WaypointList,
)
from .scenes import load_builtin_scene, load_scene
from .session import Session

__all__ = [
    "ArmTarget",
    "Box",
    "ColorState",
    "ManipulationWaypoint",
    "NavigationWaypoint",
    "RobotModel",
    "RobotState",
    "Scene",
    "Session",
    "WaypointKind",
    "WaypointList",
    "load_builtin_scene",
    "load_scene",
]
