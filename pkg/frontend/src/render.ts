// Pure rendering: (store, view state) -> display list. The painter turns
// display items into canvas calls; tests inspect the items directly.

import { isBusy, WaypointKind } from "./protocol.js";
import { SessionStore, WaypointView } from "./store.js";

// Color contract: robot-related things are light blue, pre-check warnings
// orange, planner failures red, plan previews turquoise, operator-only
// affordances yellow.
export const COLOR_DEFAULT = "#5ac8fa";
export const COLOR_WARNING = "#ff9500";
export const COLOR_ERROR = "#e03131";
export const COLOR_GHOST = "#40e0d0";
export const COLOR_AFFORDANCE = "#ffd60a";
export const COLOR_ROBOT = "#d7e3ea";

export function colorFor(state: WaypointView["colorState"]): string {
  if (state === "warning") return COLOR_WARNING;
  if (state === "error") return COLOR_ERROR;
  return COLOR_DEFAULT;
}

export type ViewName = "nav" | "arm";

export interface ViewState {
  active: ViewName;
  pan: [number, number];
  zoom: number;
  selection: number | null;
  drag: { id: number; pose: [number, number, number] } | null;
  ghostCursor: number | null;   // sample index into the proposal ghost
}

export function initialViewState(): ViewState {
  return {
    active: "nav",
    pan: [0, 0],
    zoom: 120,
    selection: null,
    drag: null,
    ghostCursor: null,
  };
}

export type DisplayItem =
  | { kind: "waypoint"; view: ViewName; id: number; x: number; y: number;
      heading: number; color: string; waypointKind: WaypointKind;
      silhouetteHeight: number | null; selected: boolean }
  | { kind: "label"; view: ViewName; text: string; x: number; y: number;
      color: string; screenAligned: true }
  | { kind: "ghost_robot"; view: ViewName; x: number; y: number;
      heading: number; joints: number[]; torso: number; gripper: number;
      color: string }
  | { kind: "path_marker"; view: ViewName; x: number; y: number; color: string }
  | { kind: "robot"; view: ViewName; x: number; y: number; heading: number;
      joints: number[]; torso: number; gripper: number; color: string }
  | { kind: "obstacle"; view: ViewName; x0: number; y0: number; x1: number;
      y1: number; label: string; color: string }
  | { kind: "affordance"; view: ViewName; role: string; x: number; y: number;
      color: string; enabled: boolean }
  | { kind: "status_banner"; text: string; color: string }
  | { kind: "warning_strip"; text: string; color: string };

export interface SceneBox {
  x: [number, number];
  y: [number, number];
  z: [number, number];
  label: string;
}

const LABEL_OFFSET = 0.12;   // m above the waypoint, drawn screen-aligned

export function render(
  store: SessionStore,
  view: ViewState,
  scene: SceneBox[] = [],
): DisplayItem[] {
  const items: DisplayItem[] = [];
  const busy = isBusy(store.status);

  for (const box of scene) {
    items.push({
      kind: "obstacle", view: "nav", x0: box.x[0], y0: box.y[0],
      x1: box.x[1], y1: box.y[1], label: box.label, color: "#8a939b",
    });
  }

  if (store.robot) {
    const [bx, by, bh] = store.robot.base;
    items.push({
      kind: "robot", view: "nav", x: bx, y: by, heading: bh,
      joints: store.robot.joints, torso: store.robot.torso,
      gripper: store.robot.gripper, color: COLOR_ROBOT,
    });
    items.push({
      kind: "robot", view: "arm", x: 0, y: 0, heading: 0,
      joints: store.robot.joints, torso: store.robot.torso,
      gripper: store.robot.gripper, color: COLOR_ROBOT,
    });
  } else {
    items.push({
      kind: "warning_strip", text: "no robot state received yet",
      color: COLOR_WARNING,
    });
  }

  for (const wp of store.byLabel("navigation")) {
    const pose = store.displayedPose(wp.id) ?? wp.pose;
    const color = colorFor(wp.colorState);
    items.push({
      kind: "waypoint", view: "nav", id: wp.id, x: pose[0], y: pose[1],
      heading: pose[2], color, waypointKind: "navigation",
      silhouetteHeight: wp.heightCommand, selected: view.selection === wp.id,
    });
    items.push({
      kind: "label", view: "nav", text: String(wp.label), x: pose[0],
      y: pose[1] + LABEL_OFFSET, color, screenAligned: true,
    });
  }

  for (const wp of store.byLabel("manipulation")) {
    const pose = store.displayedPose(wp.id) ?? wp.pose;   // (d, z, pitch)
    const color = colorFor(wp.colorState);
    items.push({
      kind: "waypoint", view: "arm", id: wp.id, x: pose[0], y: pose[1],
      heading: pose[2], color, waypointKind: "manipulation",
      silhouetteHeight: null, selected: view.selection === wp.id,
    });
    items.push({
      kind: "label", view: "arm", text: String(wp.label), x: pose[0],
      y: pose[1] + LABEL_OFFSET, color, screenAligned: true,
    });
  }

  if (store.proposal) {
    for (const [mx, my] of store.proposal.pathMarkers) {
      items.push({ kind: "path_marker", view: "nav", x: mx, y: my,
                   color: COLOR_GHOST });
    }
    const ghost = store.proposal.ghost;
    if (ghost.length > 0) {
      const cursor = view.ghostCursor ?? 0;
      const sample = ghost[Math.max(0, Math.min(cursor, ghost.length - 1))];
      const viewName: ViewName =
        store.proposal.which === "navigation" ? "nav" : "arm";
      items.push({
        kind: "ghost_robot", view: viewName,
        x: sample.base[0], y: sample.base[1], heading: sample.base[2],
        joints: sample.joints, torso: sample.torso, gripper: sample.gripper,
        color: COLOR_GHOST,
      });
    }
  }

  // operator-only handles: view switch, drag handles, scrubber
  items.push({
    kind: "affordance", view: view.active, role: "view-toggle",
    x: 0, y: 0, color: COLOR_AFFORDANCE, enabled: true,
  });
  if (view.selection !== null && store.waypoints.has(view.selection)) {
    const wp = store.waypoints.get(view.selection)!;
    const pose = store.displayedPose(wp.id) ?? wp.pose;
    items.push({
      kind: "affordance", view: wp.kind === "navigation" ? "nav" : "arm",
      role: "drag-handle", x: pose[0], y: pose[1], color: COLOR_AFFORDANCE,
      enabled: !busy,
    });
  }
  if (store.proposal && store.proposal.ghost.length > 0) {
    items.push({
      kind: "affordance", view: view.active, role: "ghost-scrubber",
      x: 0, y: 0, color: COLOR_AFFORDANCE, enabled: true,
    });
  }

  items.push({ kind: "status_banner", text: store.status, color: COLOR_DEFAULT });
  return items;
}
