"""Wire protocol: one code path turns inbound operator messages into
session calls and session changes into outbound messages.

Both the websocket server and the headless replay driver run through
ProtocolSession, so a script produces the same outbound sequence either
way. Outbound ops: robot_state, waypoint_update, status, plan_proposal,
event, error."""

from __future__ import annotations

import json
from typing import Any, Optional

from .manip_planner import ManipPlan
from .model import (
    ArmTarget,
    ManipulationWaypoint,
    NavigationWaypoint,
    OperationError,
    RobotModel,
    RobotState,
    Scene,
    WaypointKind,
)
from .session import (
    ImmediateGripper,
    ImmediateHeight,
    LookAt,
    Session,
)
from .waypoints import SetCollisionToggle, SetGripper, SetHeight


class BadMessage(OperationError):
    code = "bad_message"


class UnknownOp(OperationError):
    code = "unknown_op"


def _num(msg: dict, key: str) -> float:
    v = msg.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise BadMessage(f"field {key!r}: expected a number")
    return float(v)


def _triple(msg: dict, key: str) -> tuple[float, float, float]:
    v = msg.get(key)
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 3
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    ):
        raise BadMessage(f"field {key!r}: expected [a, b, c]")
    return (float(v[0]), float(v[1]), float(v[2]))


def _kind(msg: dict, key: str = "kind") -> WaypointKind:
    v = msg.get(key)
    try:
        return WaypointKind(v)
    except ValueError:
        raise BadMessage(f"field {key!r}: expected 'manipulation' or 'navigation'")


def robot_state_payload(state: RobotState) -> dict:
    return {
        "base": [state.base_pose[0], state.base_pose[1], state.base_pose[2]],
        "torso": state.torso_height,
        "joints": list(state.joints),
        "gripper": state.gripper_aperture,
        "head": [state.head_pan, state.head_tilt],
    }


def _wire_waypoint(kind: WaypointKind, label: int, wp) -> dict:
    out = {
        "op": "waypoint_update",
        "kind": kind.value,
        "id": wp.id,
        "label": label,
        "color_state": wp.color_state.value,
    }
    if kind is WaypointKind.MANIPULATION:
        out["pose"] = [wp.target.d, wp.target.z, wp.target.pitch]
        out["gripper_command"] = wp.gripper_command
    else:
        out["pose"] = [wp.pose[0], wp.pose[1], wp.pose[2]]
        out["height_command"] = wp.height_command
        out["collision_toggle"] = wp.collision_toggle
    return out


class ProtocolSession:
    """A session plus the bookkeeping to emit change-driven messages."""

    def __init__(self, scene: Scene, model: Optional[RobotModel] = None,
                 rng_seed: int = 0, tick_hz: float = 20.0, session_id: int = 0,
                 planner_node_cap: Optional[int] = None):
        kwargs = {} if planner_node_cap is None else {
            "planner_node_cap": planner_node_cap
        }
        self.session = Session(scene, model=model, rng_seed=rng_seed,
                               session_id=session_id, **kwargs)
        self.tick_dt = 1.0 / tick_hz
        self._seen: dict[int, dict] = {}
        self._last_status: Optional[str] = None
        self._last_proposal: Any = None

    # -- outbound assembly --------------------------------------------

    def _robot_state_msg(self) -> dict:
        msg = {"op": "robot_state", "t": round(self.session.clock, 9)}
        msg.update(robot_state_payload(self.session.robot))
        return msg

    def _status_msg(self) -> dict:
        return {"op": "status", "text": self.session.status.render()}

    def _proposal_msg(self) -> dict:
        plan = self.session.proposal
        msg: dict = {"op": "plan_proposal",
                     "which": self.session.proposal_kind.value}
        if isinstance(plan, ManipPlan):
            msg["ghost"] = [robot_state_payload(s) for s in plan.ghost]
            msg["path_markers"] = []
        else:
            msg["ghost"] = []
            msg["path_markers"] = [[x, y] for x, y in plan.path_markers]
        return msg

    def _diffs(self) -> list[dict]:
        out: list[dict] = []
        current: dict[int, dict] = {}
        for wlist in (self.session.manip_list, self.session.nav_list):
            for i, wp in enumerate(wlist.items):
                current[wp.id] = _wire_waypoint(wlist.kind, i + 1, wp)
        for wid, seen in self._seen.items():
            if wid not in current:
                out.append({"op": "waypoint_update", "id": wid, "removed": True,
                            "kind": seen["kind"]})
        for wid, msg in current.items():
            if self._seen.get(wid) != msg:
                out.append(msg)
        self._seen = current

        if self.session.status.render() != self._last_status:
            self._last_status = self.session.status.render()
            out.append(self._status_msg())
        if (
            self.session.proposal is not None
            and self.session.proposal is not self._last_proposal
        ):
            out.append(self._proposal_msg())
        self._last_proposal = self.session.proposal
        return out

    # -- entry points ---------------------------------------------------

    def hello(self) -> list[dict]:
        """First messages after connect: live state and current status."""
        self._last_status = self.session.status.render()
        return [self._robot_state_msg(), self._status_msg()]

    def tick(self, dt: Optional[float] = None) -> list[dict]:
        events = self.session.tick(dt if dt is not None else self.tick_dt)
        out = [{"op": "event", **ev} for ev in events
               if ev["type"] != "status_changed"]
        out.extend(self._diffs())
        out.append(self._robot_state_msg())
        return out

    def handle(self, msg: Any) -> list[dict]:
        """Apply one inbound message; always returns >= 1 outbound."""
        try:
            out = self._dispatch(msg)
        except OperationError as exc:
            return [{"op": "error", "code": exc.code, "message": str(exc)}]
        except (TypeError, ValueError, KeyError) as exc:
            return [{"op": "error", "code": "bad_message", "message": str(exc)}]
        diffs = self._diffs()
        result = out + diffs
        if not result:
            result = [{"op": "event", "type": "ok",
                       "request": msg.get("op") if isinstance(msg, dict) else None}]
        return result

    # -- inbound dispatch ----------------------------------------------

    def _dispatch(self, msg: Any) -> list[dict]:
        if not isinstance(msg, dict) or not isinstance(msg.get("op"), str):
            raise BadMessage("expected an object with an 'op' field")
        op = msg["op"]
        handler = getattr(self, f"_op_{op}", None)
        if handler is None:
            raise UnknownOp(f"unknown op {op!r}")
        return handler(msg) or []

    def _op_create_waypoint(self, msg: dict) -> list[dict]:
        kind = _kind(msg)
        insert_after = msg.get("insert_after")
        if insert_after is not None and not isinstance(insert_after, int):
            raise BadMessage("field 'insert_after': expected an integer")
        if kind is WaypointKind.MANIPULATION:
            d, z, pitch = _triple(msg, "target")
            payload = ManipulationWaypoint(
                id=0,
                target=ArmTarget(d=d, z=z, pitch=pitch),
                gripper_command=(
                    _num(msg, "gripper") if msg.get("gripper") is not None else None
                ),
            )
        else:
            payload = NavigationWaypoint(
                id=0,
                pose=_triple(msg, "pose"),
                height_command=(
                    _num(msg, "height") if msg.get("height") is not None else None
                ),
                collision_toggle=bool(msg.get("collision_toggle", True)),
            )
        self.session.create_waypoint(payload, insert_after=insert_after)
        return []

    def _op_duplicate_after(self, msg: dict) -> list[dict]:
        self.session.duplicate_after(int(_num(msg, "id")))
        return []

    def _op_remove_last(self, msg: dict) -> list[dict]:
        removed = self.session.remove_last(_kind(msg))
        if removed is None:
            return [{"op": "event", "type": "remove_last_empty",
                     "kind": msg.get("kind")}]
        return []

    def _op_move_waypoint(self, msg: dict) -> list[dict]:
        wid = int(_num(msg, "id"))
        if "target" in msg:
            d, z, pitch = _triple(msg, "target")
            self.session.move_waypoint(wid, ArmTarget(d=d, z=z, pitch=pitch))
        elif "pose" in msg:
            self.session.move_waypoint(wid, _triple(msg, "pose"))
        else:
            raise BadMessage("move_waypoint needs 'target' or 'pose'")
        return []

    def _op_set_gripper(self, msg: dict) -> list[dict]:
        self.session.set_waypoint_state(
            int(_num(msg, "id")), SetGripper(_num(msg, "value"))
        )
        return []

    def _op_set_height(self, msg: dict) -> list[dict]:
        self.session.set_waypoint_state(
            int(_num(msg, "id")), SetHeight(_num(msg, "value"))
        )
        return []

    def _op_set_collision_toggle(self, msg: dict) -> list[dict]:
        self.session.set_waypoint_state(
            int(_num(msg, "id")), SetCollisionToggle(bool(msg.get("on")))
        )
        return []

    def _op_request_plan(self, msg: dict) -> list[dict]:
        self.session.request_plan(_kind(msg, "which"))
        return []

    def _op_approve(self, msg: dict) -> list[dict]:
        self.session.approve()
        return []

    def _op_deny(self, msg: dict) -> list[dict]:
        self.session.deny()
        return []

    def _op_immediate_height(self, msg: dict) -> list[dict]:
        self.session.immediate(ImmediateHeight(_num(msg, "value")))
        return []

    def _op_immediate_gripper(self, msg: dict) -> list[dict]:
        self.session.immediate(ImmediateGripper(_num(msg, "value")))
        return []

    def _op_look_at(self, msg: dict) -> list[dict]:
        self.session.immediate(
            LookAt(_num(msg, "x"), _num(msg, "y"), _num(msg, "z"))
        )
        return []


def encode(msg: dict) -> str:
    """Canonical JSON encoding (stable key order, plain floats)."""
    return json.dumps(msg, sort_keys=True, separators=(",", ":"))
