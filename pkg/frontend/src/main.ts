// Operator console wiring: one store, one websocket, two canvases, a
// status banner, and the control strip. Rendering is a pure function of
// (store, view state); this file only routes events.

import { Camera, paint, screenToWorld } from "./canvas.js";
import { Connection, serverUrl } from "./connection.js";
import {
  buttonToMessage,
  pointerToMessages,
  scrubGhost,
  sliderToMessage,
  toggleToMessage,
} from "./input.js";
import { isBusy } from "./protocol.js";
import { initialViewState, render, SceneBox, ViewName } from "./render.js";
import { SessionStore } from "./store.js";

const ARM_GEOMETRY = { links: [0.35, 0.3, 0.15], shoulderOffset: 0.1,
                       baseHeight: 0.7 };

const store = new SessionStore();
const view = initialViewState();
const conn = new Connection(store);
const scene: SceneBox[] = [];   // populated from ?scene= JSON when provided

const navCanvas = document.getElementById("nav") as HTMLCanvasElement;
const armCanvas = document.getElementById("arm") as HTMLCanvasElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const errorStrip = document.getElementById("errors") as HTMLDivElement;
const scrubber = document.getElementById("scrubber") as HTMLInputElement;

const navCam: Camera = { centerX: 0, centerY: 0, scale: 120 };
const armCam: Camera = { centerX: 0.4, centerY: 0.9, scale: 260 };

function repaint(): void {
  const items = render(store, view, scene);
  paint(navCanvas, navCam, "nav", items, ARM_GEOMETRY);
  paint(armCanvas, armCam, "arm", items, ARM_GEOMETRY);
  banner.textContent = store.status;
  banner.className = isBusy(store.status) ? "banner busy" : "banner";
  errorStrip.textContent = store.lastError
    ? `${store.lastError.code}: ${store.lastError.message}`
    : "";
  const ghost = store.proposal?.ghost ?? [];
  scrubber.style.display = ghost.length > 0 ? "block" : "none";
  scrubber.max = String(Math.max(0, ghost.length - 1));
}

store.onChange = repaint;

function canvasFor(name: ViewName): [HTMLCanvasElement, Camera] {
  return name === "nav" ? [navCanvas, navCam] : [armCanvas, armCam];
}

function hitTest(name: ViewName, wx: number, wy: number): number | null {
  const [, cam] = canvasFor(name);
  const radiusWorld = 16 / cam.scale;
  const kind = name === "nav" ? "navigation" : "manipulation";
  for (const wp of store.byLabel(kind)) {
    const pose = store.displayedPose(wp.id) ?? wp.pose;
    const dx = pose[0] - wx;
    const dy = pose[1] - wy;
    if (Math.hypot(dx, dy) <= radiusWorld) return wp.id;
  }
  return null;
}

function bindPointer(name: ViewName): void {
  const [canvas, cam] = canvasFor(name);
  const worldOf = (ev: PointerEvent): [number, number] => {
    const rect = canvas.getBoundingClientRect();
    return screenToWorld(cam, canvas, ev.clientX - rect.left,
                         ev.clientY - rect.top);
  };
  canvas.addEventListener("pointerdown", (ev) => {
    const world = worldOf(ev);
    conn.send(pointerToMessages({
      type: "down", view: name, world,
      hitWaypoint: hitTest(name, world[0], world[1]),
      duplicateModifier: ev.shiftKey, nowMs: performance.now(),
    }, view, store));
    repaint();
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (!view.drag) return;
    conn.send(pointerToMessages({
      type: "move", view: name, world: worldOf(ev), hitWaypoint: null,
      nowMs: performance.now(),
    }, view, store));
    repaint();
  });
  canvas.addEventListener("pointerup", (ev) => {
    conn.send(pointerToMessages({
      type: "up", view: name, world: worldOf(ev), hitWaypoint: null,
      nowMs: performance.now(),
    }, view, store));
    repaint();
  });
}

bindPointer("nav");
bindPointer("arm");

function bindButton(id: string, role: Parameters<typeof buttonToMessage>[1]): void {
  document.getElementById(id)?.addEventListener("click", () => {
    conn.send(buttonToMessage(store, role, view));
  });
}

bindButton("plan-nav", "plan-nav");
bindButton("plan-manip", "plan-manip");
bindButton("approve", "approve");
bindButton("deny", "deny");
bindButton("remove-last-nav", "remove-last-nav");
bindButton("remove-last-manip", "remove-last-manip");

function bindSlider(id: string, role: "gripper" | "height" | "immediate-height"
                    | "immediate-gripper", perWaypoint: boolean): void {
  const el = document.getElementById(id) as HTMLInputElement | null;
  el?.addEventListener("change", () => {
    const wid = perWaypoint ? view.selection : null;
    conn.send(sliderToMessage(store, role, Number(el.value), wid));
  });
}

bindSlider("wp-gripper", "gripper", true);
bindSlider("wp-height", "height", true);
bindSlider("imm-height", "immediate-height", false);
bindSlider("imm-gripper", "immediate-gripper", false);

(document.getElementById("wp-toggle") as HTMLInputElement | null)
  ?.addEventListener("change", (ev) => {
    const el = ev.target as HTMLInputElement;
    conn.send(toggleToMessage(store, view.selection, el.checked));
  });

scrubber.addEventListener("input", () => {
  scrubGhost(view, store, Number(scrubber.value));   // never sends messages
  repaint();
});

document.getElementById("help-button")?.addEventListener("click", () => {
  document.getElementById("help")?.classList.toggle("visible");
});

conn.onStateChange = (ok) => {
  banner.textContent = ok ? store.status : "disconnected";
  if (!ok) banner.className = "banner error";
};

conn.connect(serverUrl());
repaint();
