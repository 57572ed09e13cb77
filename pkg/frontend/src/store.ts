// Server-authoritative session mirror. Every displayed pose, label and
// color comes from the latest server message; the only local state is the
// optimistic echo of an in-flight drag, which snaps back when the server
// rejects the move.

import {
  ColorStateName,
  RobotStatePayload,
  ServerMsg,
  StatusMsg,
  STATUS_READY,
  STATUS_SUCCESSFUL,
  WaypointKind,
  WaypointUpdateMsg,
} from "./protocol.js";

export interface WaypointView {
  id: number;
  kind: WaypointKind;
  label: number;
  pose: [number, number, number];
  colorState: ColorStateName;
  gripperCommand: number | null;
  heightCommand: number | null;
  collisionToggle: boolean;
}

export interface Proposal {
  which: WaypointKind;
  ghost: RobotStatePayload[];
  pathMarkers: [number, number][];
}

export class SessionStore {
  robot: RobotStatePayload | null = null;
  status: string = STATUS_READY;
  waypoints = new Map<number, WaypointView>();
  proposal: Proposal | null = null;
  lastError: { code: string; message: string } | null = null;
  eventTypes: string[] = [];
  /** optimistic pose echo for the waypoint being dragged */
  pendingMove = new Map<number, [number, number, number]>();
  onChange: (() => void) | null = null;

  apply(msg: ServerMsg): void {
    switch (msg.op) {
      case "robot_state": {
        const { op: _op, t: _t, ...payload } = msg;
        this.robot = payload as RobotStatePayload;
        break;
      }
      case "status":
        this.applyStatus(msg);
        break;
      case "waypoint_update":
        this.applyWaypoint(msg);
        break;
      case "plan_proposal":
        this.proposal = {
          which: msg.which,
          ghost: msg.ghost,
          pathMarkers: msg.path_markers,
        };
        break;
      case "event":
        this.eventTypes.push(msg.type);
        break;
      case "error":
        this.lastError = { code: msg.code, message: msg.message };
        if (msg.code === "placement_blocked") {
          // the server kept the old pose: drop the optimistic echo
          this.pendingMove.clear();
        }
        break;
    }
    this.onChange?.();
  }

  applyJson(text: string): void {
    let msg: ServerMsg;
    try {
      msg = JSON.parse(text) as ServerMsg;
    } catch {
      return;
    }
    this.apply(msg);
  }

  private applyStatus(msg: StatusMsg): void {
    this.status = msg.text;
    // a proposal only exists while the plan awaits approval or runs
    if (msg.text !== STATUS_SUCCESSFUL && !msg.text.startsWith("Executing")) {
      this.proposal = null;
    }
  }

  private applyWaypoint(msg: WaypointUpdateMsg): void {
    if (msg.removed) {
      this.waypoints.delete(msg.id);
      this.pendingMove.delete(msg.id);
      return;
    }
    this.waypoints.set(msg.id, {
      id: msg.id,
      kind: msg.kind,
      label: msg.label ?? 0,
      pose: msg.pose ?? [0, 0, 0],
      colorState: msg.color_state ?? "default",
      gripperCommand: msg.gripper_command ?? null,
      heightCommand: msg.height_command ?? null,
      collisionToggle: msg.collision_toggle ?? true,
    });
    // fresh server truth supersedes the optimistic echo
    this.pendingMove.delete(msg.id);
  }

  /** pose to draw: optimistic drag echo if present, else server truth */
  displayedPose(id: number): [number, number, number] | null {
    const pending = this.pendingMove.get(id);
    if (pending) return pending;
    return this.waypoints.get(id)?.pose ?? null;
  }

  byLabel(kind: WaypointKind): WaypointView[] {
    return [...this.waypoints.values()]
      .filter((w) => w.kind === kind)
      .sort((a, b) => a.label - b.label);
  }
}
