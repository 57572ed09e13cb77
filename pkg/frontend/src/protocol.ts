// Wire protocol types, mirroring the server's JSON messages.
// Lengths are meters, angles radians, time seconds.

export type WaypointKind = "manipulation" | "navigation";
export type ColorStateName = "default" | "warning" | "error";

export interface RobotStatePayload {
  base: [number, number, number];
  torso: number;
  joints: number[];
  gripper: number;
  head: [number, number];
}

export interface RobotStateMsg extends RobotStatePayload {
  op: "robot_state";
  t: number;
}

export interface WaypointUpdateMsg {
  op: "waypoint_update";
  id: number;
  kind: WaypointKind;
  removed?: boolean;
  label?: number;
  pose?: [number, number, number];
  color_state?: ColorStateName;
  gripper_command?: number | null;
  height_command?: number | null;
  collision_toggle?: boolean;
}

export interface StatusMsg {
  op: "status";
  text: string;
}

export interface PlanProposalMsg {
  op: "plan_proposal";
  which: WaypointKind;
  ghost: RobotStatePayload[];
  path_markers: [number, number][];
}

export interface EventMsg {
  op: "event";
  type: string;
  t?: number;
  [key: string]: unknown;
}

export interface ErrorMsg {
  op: "error";
  code: string;
  message: string;
}

export type ServerMsg =
  | RobotStateMsg
  | WaypointUpdateMsg
  | StatusMsg
  | PlanProposalMsg
  | EventMsg
  | ErrorMsg;

export type ClientMsg =
  | { op: "create_waypoint"; kind: "navigation"; pose: [number, number, number];
      height?: number; collision_toggle?: boolean; insert_after?: number }
  | { op: "create_waypoint"; kind: "manipulation";
      target: [number, number, number]; gripper?: number; insert_after?: number }
  | { op: "move_waypoint"; id: number; pose?: [number, number, number];
      target?: [number, number, number] }
  | { op: "duplicate_after"; id: number }
  | { op: "remove_last"; kind: WaypointKind }
  | { op: "set_gripper"; id: number; value: number }
  | { op: "set_height"; id: number; value: number }
  | { op: "set_collision_toggle"; id: number; on: boolean }
  | { op: "request_plan"; which: WaypointKind }
  | { op: "approve" }
  | { op: "deny" }
  | { op: "immediate_height"; value: number }
  | { op: "immediate_gripper"; value: number }
  | { op: "look_at"; x: number; y: number; z: number };

export const STATUS_READY = "Ready to plan!";
export const STATUS_PLANNING = "Planning...";
export const STATUS_SUCCESSFUL = "Plan Successful!";

export function isExecuting(status: string): boolean {
  return status.startsWith("Executing Waypoint");
}

export function isBusy(status: string): boolean {
  return status === STATUS_PLANNING || isExecuting(status);
}
