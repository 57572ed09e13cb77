"""Operator session: plan lifecycle state machine, waypoint-list ownership,
timed execution of approved plans, and immediate (planner-bypassing)
commands.

Simulated time only advances through tick(), so a session driven by the
same inputs replays identically."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union

import numpy as np

from . import manip_planner, nav_planner, waypoints as wp_ops
from .manip_planner import GRIPPER_RATE, ManipPlan, plan_manipulation
from .model import (
    ArmTarget,
    Busy,
    BadState,
    ColorState,
    EmptyList,
    ManipulationWaypoint,
    NavigationWaypoint,
    NotFound,
    RobotModel,
    RobotState,
    Scene,
    Waypoint,
    WaypointKind,
    WaypointList,
    clamp,
    wrap_angle,
)
from .nav_planner import NavPlan, PlanFailure, plan_navigation
from .waypoints import ListContext, StateCommand


class StatusKind(Enum):
    READY = "ready"
    PLANNING = "planning"
    SUCCESSFUL = "successful"
    EXECUTING = "executing"
    FAILED = "failed"


@dataclass(frozen=True)
class PlannerStatus:
    kind: StatusKind
    current: int = 0
    total: int = 0
    failed_label: int = 0

    def render(self) -> str:
        if self.kind is StatusKind.READY:
            return "Ready to plan!"
        if self.kind is StatusKind.PLANNING:
            return "Planning..."
        if self.kind is StatusKind.SUCCESSFUL:
            return "Plan Successful!"
        if self.kind is StatusKind.EXECUTING:
            return f"Executing Waypoint {self.current} / {self.total}"
        return f"Plan Failed at Waypoint {self.failed_label}"


READY = PlannerStatus(StatusKind.READY)
PLANNING = PlannerStatus(StatusKind.PLANNING)
SUCCESSFUL = PlannerStatus(StatusKind.SUCCESSFUL)


def executing(current: int, total: int) -> PlannerStatus:
    return PlannerStatus(StatusKind.EXECUTING, current=current, total=total)


def failed_at(label: int) -> PlannerStatus:
    return PlannerStatus(StatusKind.FAILED, failed_label=label)


@dataclass(frozen=True)
class ImmediateHeight:
    value: float


@dataclass(frozen=True)
class ImmediateGripper:
    value: float


@dataclass(frozen=True)
class LookAt:
    x: float
    y: float
    z: float


ImmediateCommand = Union[ImmediateHeight, ImmediateGripper, LookAt]

Event = dict


@dataclass
class _PendingJob:
    which: WaypointKind
    snapshot: list[Waypoint]
    state: RobotState
    seed: int


@dataclass
class _ExecCursor:
    which: WaypointKind
    plan: Union[ManipPlan, NavPlan]
    seg: int = 0
    leg: int = 0
    leg_elapsed: float = 0.0
    phase: str = "start"          # start | move | command
    cmd_elapsed: float = 0.0
    cmd_duration: float = 0.0
    cmd_from: float = 0.0
    cmd_to: float = 0.0


class Session:
    """Single-operator session owning one robot and two waypoint lists."""

    def __init__(self, scene: Scene, model: Optional[RobotModel] = None,
                 rng_seed: int = 0, session_id: int = 0,
                 planner_node_cap: int = manip_planner.NODE_CAP):
        self.id = session_id
        self.scene = scene
        self.model = model or RobotModel()
        self.planner_node_cap = planner_node_cap
        self.robot = RobotState(joints=self.model.home_joints).clamped(self.model)
        self.manip_list = WaypointList(kind=WaypointKind.MANIPULATION)
        self.nav_list = WaypointList(kind=WaypointKind.NAVIGATION)
        self.status: PlannerStatus = READY
        self.proposal: Optional[Union[ManipPlan, NavPlan]] = None
        self.proposal_kind: Optional[WaypointKind] = None
        self.event_log: list[Event] = []
        self.clock = 0.0
        self.rng_seed = rng_seed
        self._next_id = 1
        self._plan_counter = 0
        self._job: Optional[_PendingJob] = None
        self._exec: Optional[_ExecCursor] = None
        self._torso_target: Optional[float] = None
        self._gripper_target: Optional[float] = None

    # ----- helpers ---------------------------------------------------

    def _ctx(self) -> ListContext:
        return ListContext(model=self.model, scene=self.scene, robot=self.robot)

    def list_of(self, kind: WaypointKind) -> WaypointList:
        return self.manip_list if kind is WaypointKind.MANIPULATION else self.nav_list

    def _list_with(self, wid: int) -> WaypointList:
        for wlist in (self.manip_list, self.nav_list):
            if any(wp.id == wid for wp in wlist.items):
                return wlist
        raise NotFound(f"no waypoint with id {wid}")

    def _log(self, etype: str, t: Optional[float] = None, **payload) -> Event:
        ev: Event = {"t": round(self.clock if t is None else t, 9), "type": etype}
        ev.update(payload)
        if self.event_log:
            assert ev["t"] >= self.event_log[-1]["t"] - 1e-9
        self.event_log.append(ev)
        return ev

    def _set_status(self, status: PlannerStatus, t: Optional[float] = None
                    ) -> Optional[Event]:
        if status == self.status:
            return None
        self.status = status
        return self._log("status_changed", t=t, status=status.render())

    def _guard_mutation(self) -> None:
        if self.status.kind in (StatusKind.PLANNING, StatusKind.EXECUTING):
            raise Busy(f"list edits rejected while {self.status.render()!r}")

    def _after_mutation(self) -> None:
        if self.status.kind is StatusKind.SUCCESSFUL:
            self.proposal = None
            self.proposal_kind = None
            self._set_status(READY)
        elif self.status.kind is StatusKind.FAILED:
            self._set_status(READY)

    # ----- waypoint-list operations ----------------------------------

    def create_waypoint(self, payload: Waypoint,
                        insert_after: Optional[int] = None) -> int:
        self._guard_mutation()
        wid = self._next_id
        wp_ops.create_waypoint(
            self._ctx(), self.list_of(payload.kind), payload, wid, insert_after
        )
        self._next_id += 1
        self._after_mutation()
        return wid

    def duplicate_after(self, source_id: int) -> int:
        self._guard_mutation()
        wlist = self._list_with(source_id)
        wid = self._next_id
        wp_ops.duplicate_after(self._ctx(), wlist, source_id, wid)
        self._next_id += 1
        self._after_mutation()
        return wid

    def remove_last(self, kind: WaypointKind) -> Optional[int]:
        self._guard_mutation()
        removed = wp_ops.remove_last(self.list_of(kind))
        if removed is not None:
            self._after_mutation()
        return removed

    def move_waypoint(self, wid: int,
                      new_target: Union[ArmTarget, tuple[float, float, float]]
                      ) -> ColorState:
        self._guard_mutation()
        color = wp_ops.move_waypoint(self._ctx(), self._list_with(wid), wid, new_target)
        self._after_mutation()
        return color

    def set_waypoint_state(self, wid: int, command: StateCommand) -> None:
        self._guard_mutation()
        wp_ops.set_waypoint_state(self._ctx(), self._list_with(wid), wid, command)
        self._after_mutation()

    # ----- plan lifecycle --------------------------------------------

    def request_plan(self, which: WaypointKind) -> None:
        if self.status.kind not in (StatusKind.READY, StatusKind.SUCCESSFUL,
                                    StatusKind.FAILED):
            raise Busy(f"cannot plan while {self.status.render()!r}")
        wlist = self.list_of(which)
        if not wlist.items:
            raise EmptyList(f"the {which.value} list is empty")
        self.proposal = None
        self.proposal_kind = None
        seed = int(
            np.random.SeedSequence([self.rng_seed, self._plan_counter]).generate_state(1)[0]
        )
        self._plan_counter += 1
        self._job = _PendingJob(
            which=which,
            snapshot=[replace(wp) for wp in wlist.items],
            state=self.robot.copy(),
            seed=seed,
        )
        self._set_status(PLANNING)

    def _complete_job(self) -> None:
        job = self._job
        assert job is not None
        self._job = None
        if job.which is WaypointKind.MANIPULATION:
            result = plan_manipulation(
                self.model, job.state, self.scene, job.snapshot, job.seed,
                node_cap=self.planner_node_cap,
            )
        else:
            result = plan_navigation(self.scene, self.model, job.state, job.snapshot)
        if isinstance(result, PlanFailure):
            wid = wp_ops.mark_plan_failure(self.list_of(job.which), result.label)
            self._log("plan_failed", which=job.which.value, waypoint=result.label,
                      reason=result.reason, waypoint_id=wid)
            self._set_status(failed_at(result.label))
        else:
            self.proposal = result
            self.proposal_kind = job.which
            self._set_status(SUCCESSFUL)

    def approve(self) -> None:
        if self.status.kind is not StatusKind.SUCCESSFUL:
            raise BadState(f"nothing to approve while {self.status.render()!r}")
        assert self.proposal is not None and self.proposal_kind is not None
        total = len(self.proposal.segments)
        self._exec = _ExecCursor(which=self.proposal_kind, plan=self.proposal)
        self.proposal = None
        self.proposal_kind = None
        self._set_status(executing(1, total))

    def deny(self) -> None:
        if self.status.kind is not StatusKind.SUCCESSFUL:
            raise BadState(f"nothing to deny while {self.status.render()!r}")
        self.proposal = None
        self.proposal_kind = None
        self._set_status(READY)

    def immediate(self, cmd: ImmediateCommand) -> None:
        if self.status.kind is StatusKind.EXECUTING:
            raise Busy("execution owns the actuators")
        if isinstance(cmd, ImmediateHeight):
            self._torso_target = clamp(cmd.value, *self.model.torso_range)
        elif isinstance(cmd, ImmediateGripper):
            self._gripper_target = clamp(cmd.value, 0.0, 1.0)
        elif isinstance(cmd, LookAt):
            x, y, heading = self.robot.base_pose
            zh = self.model.shoulder_height(self.robot.torso_height)
            pan = wrap_angle(math.atan2(cmd.y - y, cmd.x - x) - heading)
            tilt = math.atan2(cmd.z - zh, math.hypot(cmd.x - x, cmd.y - y))
            self.robot.head_pan = clamp(pan, *self.model.head_pan_limits)
            self.robot.head_tilt = clamp(tilt, *self.model.head_tilt_limits)
        else:
            raise BadState(f"unknown immediate command {cmd!r}")

    # ----- time ------------------------------------------------------

    def tick(self, dt: float) -> list[Event]:
        """Advance simulated time; returns the events emitted."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        mark = len(self.event_log)
        if self._job is not None:
            self.clock += dt
            self._complete_job()
        elif self._exec is not None:
            self._advance_execution(dt)
            self.clock += dt
        else:
            self._apply_immediates(dt)
            self.clock += dt
        return self.event_log[mark:]

    # ----- internals -------------------------------------------------

    def _apply_immediates(self, dt: float) -> None:
        if self._torso_target is not None:
            step = self.model.torso_max_speed * dt
            delta = self._torso_target - self.robot.torso_height
            if abs(delta) <= step:
                self.robot.torso_height = self._torso_target
                self._torso_target = None
            else:
                self.robot.torso_height += math.copysign(step, delta)
        if self._gripper_target is not None:
            step = GRIPPER_RATE * dt
            delta = self._gripper_target - self.robot.gripper_aperture
            if abs(delta) <= step:
                self.robot.gripper_aperture = self._gripper_target
                self._gripper_target = None
            else:
                self.robot.gripper_aperture += math.copysign(step, delta)

    def _manip_leg_duration(self, a, b) -> float:
        span = max(abs(x - y) for x, y in zip(a, b))
        return span / self.model.joint_max_speed

    def _nav_leg_duration(self, a, b) -> float:
        dist = math.hypot(b[0] - a[0], b[1] - a[1])
        turn = abs(wrap_angle(b[2] - a[2]))
        return max(dist / self.model.base_max_speed,
                   turn / self.model.base_max_turn_rate)

    def _segment_legs(self, seg) -> list:
        path = seg.path if self._exec.which is WaypointKind.MANIPULATION else seg.poses
        return list(zip(path, path[1:]))

    def _leg_duration(self, leg) -> float:
        if self._exec.which is WaypointKind.MANIPULATION:
            return self._manip_leg_duration(*leg)
        return self._nav_leg_duration(*leg)

    def _set_leg_progress(self, leg, frac: float) -> None:
        a, b = leg
        if self._exec.which is WaypointKind.MANIPULATION:
            self.robot.joints = tuple(
                av + frac * (bv - av) for av, bv in zip(a, b)
            )
        else:
            heading = wrap_angle(a[2] + frac * wrap_angle(b[2] - a[2]))
            self.robot.base_pose = (
                a[0] + frac * (b[0] - a[0]),
                a[1] + frac * (b[1] - a[1]),
                heading if frac < 1.0 else b[2],
            )

    def _segment_command(self, seg) -> Optional[tuple[float, float, float]]:
        """(duration, from, to) of the waypoint's state command, if any."""
        if self._exec.which is WaypointKind.MANIPULATION:
            if seg.terminal_gripper is None:
                return None
            target = seg.terminal_gripper
            cur = self.robot.gripper_aperture
            return (abs(target - cur) / GRIPPER_RATE, cur, target)
        if seg.terminal_height is None:
            return None
        target = seg.terminal_height
        cur = self.robot.torso_height
        return (abs(target - cur) / self.model.torso_max_speed, cur, target)

    def _apply_command_progress(self, frac: float) -> None:
        cur = self._exec
        value = cur.cmd_from + frac * (cur.cmd_to - cur.cmd_from)
        if cur.which is WaypointKind.MANIPULATION:
            self.robot.gripper_aperture = value if frac < 1.0 else cur.cmd_to
        else:
            self.robot.torso_height = value if frac < 1.0 else cur.cmd_to

    def _advance_execution(self, dt: float) -> None:
        cur = self._exec
        remaining = dt
        while cur is not None:
            now = self.clock + (dt - remaining)
            segments = cur.plan.segments
            if cur.phase == "start":
                label = cur.seg + 1
                self._log("segment_started", t=now, waypoint=label)
                self._set_status(executing(label, len(segments)), t=now)
                cur.phase = "move"
                cur.leg = 0
                cur.leg_elapsed = 0.0
                continue
            if cur.phase == "move":
                legs = self._segment_legs(segments[cur.seg])
                if cur.leg >= len(legs):
                    self._log("waypoint_reached", t=now, waypoint=cur.seg + 1)
                    command = self._segment_command(segments[cur.seg])
                    if command is None:
                        if not self._next_segment(now):
                            return
                    else:
                        cur.phase = "command"
                        cur.cmd_elapsed = 0.0
                        cur.cmd_duration, cur.cmd_from, cur.cmd_to = command
                    continue
                leg = legs[cur.leg]
                duration = self._leg_duration(leg)
                if duration <= 0.0 or cur.leg_elapsed + remaining >= duration - 1e-12:
                    remaining -= max(0.0, duration - cur.leg_elapsed)
                    self._set_leg_progress(leg, 1.0)
                    cur.leg += 1
                    cur.leg_elapsed = 0.0
                    continue
                cur.leg_elapsed += remaining
                self._set_leg_progress(leg, cur.leg_elapsed / duration)
                return
            # phase == "command"
            if cur.cmd_duration <= 0.0 or (
                cur.cmd_elapsed + remaining >= cur.cmd_duration - 1e-12
            ):
                remaining -= max(0.0, cur.cmd_duration - cur.cmd_elapsed)
                self._apply_command_progress(1.0)
                now = self.clock + (dt - remaining)
                self._log("state_command_applied", t=now, waypoint=cur.seg + 1)
                if not self._next_segment(now):
                    return
                continue
            cur.cmd_elapsed += remaining
            self._apply_command_progress(cur.cmd_elapsed / cur.cmd_duration)
            return

    def _next_segment(self, now: float) -> bool:
        """Advance the cursor; False when the plan just completed."""
        cur = self._exec
        if cur.seg + 1 < len(cur.plan.segments):
            cur.seg += 1
            cur.phase = "start"
            return True
        self._log("plan_completed", t=now)
        self._exec = None
        self._set_status(READY, t=now)
        return False

    # ----- persistence -----------------------------------------------

    def snapshot_robot(self) -> RobotState:
        return self.robot.copy()
