// Pointer/control events -> outbound wire messages. Pure: callers
// unproject screen points into world coordinates first. While the server
// is Planning/Executing everything except view controls is disabled, so
// no message the server would reject for state reasons gets sent.

import { ClientMsg, isBusy } from "./protocol.js";
import { ViewName, ViewState } from "./render.js";
import { SessionStore } from "./store.js";

export const DRAG_SEND_INTERVAL_MS = 50;   // move_waypoint throttled to 20 Hz

export interface PointerEventLike {
  type: "down" | "move" | "up";
  view: ViewName;
  world: [number, number];
  hitWaypoint: number | null;
  duplicateModifier?: boolean;   // keyboard modifier for duplicate-after
  nowMs: number;
}

let lastDragSend = 0;

export function pointerToMessages(
  ev: PointerEventLike,
  view: ViewState,
  store: SessionStore,
): ClientMsg[] {
  if (isBusy(store.status)) return [];

  if (ev.type === "down") {
    if (ev.hitWaypoint !== null) {
      if (ev.duplicateModifier) {
        // duplicate-after gesture: the copy lands right after the held one
        view.selection = ev.hitWaypoint;
        return [{ op: "duplicate_after", id: ev.hitWaypoint }];
      }
      view.selection = ev.hitWaypoint;
      const pose = store.displayedPose(ev.hitWaypoint);
      if (pose) view.drag = { id: ev.hitWaypoint, pose };
      return [];
    }
    view.selection = null;
    if (ev.view === "nav") {
      return [{
        op: "create_waypoint", kind: "navigation",
        pose: [ev.world[0], ev.world[1], 0],
      }];
    }
    return [{
      op: "create_waypoint", kind: "manipulation",
      target: [ev.world[0], ev.world[1], 0],
    }];
  }

  if (ev.type === "move" && view.drag) {
    const wp = store.waypoints.get(view.drag.id);
    if (!wp) {
      view.drag = null;
      return [];
    }
    const heading = wp.kind === "navigation" ? view.drag.pose[2] : 0;
    const pitch = wp.kind === "manipulation" ? view.drag.pose[2] : 0;
    const pose: [number, number, number] = [
      ev.world[0], ev.world[1], wp.kind === "navigation" ? heading : pitch,
    ];
    view.drag = { id: view.drag.id, pose };
    store.pendingMove.set(view.drag.id, pose);   // optimistic local echo
    if (ev.nowMs - lastDragSend < DRAG_SEND_INTERVAL_MS) return [];
    lastDragSend = ev.nowMs;
    return [moveMessage(wp.kind, view.drag.id, pose)];
  }

  if (ev.type === "up" && view.drag) {
    const wp = store.waypoints.get(view.drag.id);
    const drag = view.drag;
    view.drag = null;
    if (!wp) return [];
    return [moveMessage(wp.kind, drag.id, drag.pose)];  // final authoritative move
  }

  return [];
}

function moveMessage(
  kind: "navigation" | "manipulation",
  id: number,
  pose: [number, number, number],
): ClientMsg {
  return kind === "navigation"
    ? { op: "move_waypoint", id, pose }
    : { op: "move_waypoint", id, target: pose };
}

export function resetDragThrottle(): void {
  lastDragSend = 0;
}

// -- widget handlers ---------------------------------------------------

export function sliderToMessage(
  store: SessionStore,
  role: "gripper" | "height" | "immediate-height" | "immediate-gripper",
  value: number,
  waypointId: number | null,
): ClientMsg[] {
  if (isBusy(store.status)) return [];
  switch (role) {
    case "gripper":
      return waypointId === null ? [] :
        [{ op: "set_gripper", id: waypointId, value }];
    case "height":
      return waypointId === null ? [] :
        [{ op: "set_height", id: waypointId, value }];
    case "immediate-height":
      return [{ op: "immediate_height", value }];
    case "immediate-gripper":
      return [{ op: "immediate_gripper", value }];
  }
}

export function toggleToMessage(
  store: SessionStore,
  waypointId: number | null,
  on: boolean,
): ClientMsg[] {
  if (isBusy(store.status) || waypointId === null) return [];
  return [{ op: "set_collision_toggle", id: waypointId, on }];
}

export function buttonToMessage(
  store: SessionStore,
  role: "plan-manip" | "plan-nav" | "approve" | "deny" | "remove-last-manip"
      | "remove-last-nav",
  _view: ViewState,
): ClientMsg[] {
  if (isBusy(store.status)) return [];
  switch (role) {
    case "plan-manip":
      return [{ op: "request_plan", which: "manipulation" }];
    case "plan-nav":
      return [{ op: "request_plan", which: "navigation" }];
    case "approve":
      return [{ op: "approve" }];
    case "deny":
      return [{ op: "deny" }];
    case "remove-last-manip":
      return [{ op: "remove_last", kind: "manipulation" }];
    case "remove-last-nav":
      return [{ op: "remove_last", kind: "navigation" }];
  }
}

/** Ghost playback never touches the session: scrubbing is view-only. */
export function scrubGhost(view: ViewState, store: SessionStore,
                           index: number): ClientMsg[] {
  const ghost = store.proposal?.ghost ?? [];
  if (ghost.length === 0) {
    view.ghostCursor = null;
    return [];
  }
  view.ghostCursor = Math.max(0, Math.min(index, ghost.length - 1));
  return [];
}

export function lookAtMessage(store: SessionStore, x: number, y: number,
                              z: number): ClientMsg[] {
  if (isBusy(store.status)) return [];
  return [{ op: "look_at", x, y, z }];
}
