// Canvas painter: turns display items into 2D context calls. Two views
// share one camera struct each; labels render screen-aligned.

import { DisplayItem, ViewName } from "./render.js";

export interface Camera {
  centerX: number;
  centerY: number;
  scale: number;     // px per meter
}

export function worldToScreen(
  cam: Camera, canvas: HTMLCanvasElement, x: number, y: number,
): [number, number] {
  return [
    canvas.width / 2 + (x - cam.centerX) * cam.scale,
    canvas.height / 2 - (y - cam.centerY) * cam.scale,
  ];
}

export function screenToWorld(
  cam: Camera, canvas: HTMLCanvasElement, px: number, py: number,
): [number, number] {
  return [
    cam.centerX + (px - canvas.width / 2) / cam.scale,
    cam.centerY - (py - canvas.height / 2) / cam.scale,
  ];
}

export function paint(
  canvas: HTMLCanvasElement,
  cam: Camera,
  viewName: ViewName,
  items: DisplayItem[],
  armGeometry: { links: number[]; shoulderOffset: number; baseHeight: number },
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.fillStyle = "#15181c";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const toPx = (x: number, y: number) => worldToScreen(cam, canvas, x, y);

  for (const item of items) {
    if (item.kind === "status_banner" || item.kind === "warning_strip") continue;
    if (item.view !== viewName) continue;
    switch (item.kind) {
      case "obstacle": {
        const [x0, y0] = toPx(item.x0, item.y1);
        const [x1, y1] = toPx(item.x1, item.y0);
        ctx.fillStyle = item.color + "55";
        ctx.strokeStyle = item.color;
        ctx.fillRect(x0, y0, x1 - x0, y1 - y0);
        ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);
        ctx.fillStyle = item.color;
        ctx.font = "11px sans-serif";
        ctx.fillText(item.label, x0 + 3, y0 + 12);
        break;
      }
      case "robot":
      case "ghost_robot": {
        if (viewName === "nav") {
          drawBaseDisc(ctx, toPx, item.x, item.y, item.heading, item.color);
        } else {
          drawArm(ctx, toPx, item.joints, item.torso, armGeometry, item.color);
        }
        break;
      }
      case "waypoint": {
        const [px, py] = toPx(item.x, item.y);
        ctx.strokeStyle = item.color;
        ctx.fillStyle = item.color + "44";
        ctx.lineWidth = item.selected ? 3 : 1.5;
        if (item.waypointKind === "navigation") {
          ctx.beginPath();
          ctx.arc(px, py, 14, 0, 2 * Math.PI);
          ctx.fill();
          ctx.stroke();
          ctx.beginPath();
          ctx.moveTo(px, py);
          ctx.lineTo(px + 18 * Math.cos(item.heading),
                     py - 18 * Math.sin(item.heading));
          ctx.stroke();
          if (item.silhouetteHeight !== null) {
            ctx.strokeRect(px - 5, py - 24 - 10 * item.silhouetteHeight, 10,
                           10 * item.silhouetteHeight + 10);
          }
        } else {
          // gripper-shaped marker oriented by pitch
          ctx.save();
          ctx.translate(px, py);
          ctx.rotate(-item.heading);
          ctx.beginPath();
          ctx.moveTo(-8, -6);
          ctx.lineTo(6, -6);
          ctx.lineTo(10, 0);
          ctx.lineTo(6, 6);
          ctx.lineTo(-8, 6);
          ctx.closePath();
          ctx.fill();
          ctx.stroke();
          ctx.restore();
        }
        ctx.lineWidth = 1;
        break;
      }
      case "path_marker": {
        const [px, py] = toPx(item.x, item.y);
        ctx.fillStyle = item.color;
        ctx.beginPath();
        ctx.arc(px, py, 4, 0, 2 * Math.PI);
        ctx.fill();
        break;
      }
      case "label": {
        const [px, py] = toPx(item.x, item.y);
        ctx.fillStyle = item.color;
        ctx.font = "bold 13px sans-serif";
        ctx.textAlign = "center";
        ctx.fillText(item.text, px, py - 6);   // screen-aligned, above
        ctx.textAlign = "start";
        break;
      }
      case "affordance": {
        if (item.role !== "drag-handle") break;
        const [px, py] = toPx(item.x, item.y);
        ctx.strokeStyle = item.color;
        ctx.setLineDash([4, 3]);
        ctx.beginPath();
        ctx.arc(px, py, 20, 0, 2 * Math.PI);
        ctx.stroke();
        ctx.setLineDash([]);
        break;
      }
    }
  }
}

function drawBaseDisc(
  ctx: CanvasRenderingContext2D,
  toPx: (x: number, y: number) => [number, number],
  x: number, y: number, heading: number, color: string,
): void {
  const [px, py] = toPx(x, y);
  ctx.strokeStyle = color;
  ctx.fillStyle = color + "33";
  ctx.beginPath();
  ctx.arc(px, py, 24, 0, 2 * Math.PI);
  ctx.fill();
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(px, py);
  ctx.lineTo(px + 24 * Math.cos(heading), py - 24 * Math.sin(heading));
  ctx.stroke();
}

function drawArm(
  ctx: CanvasRenderingContext2D,
  toPx: (x: number, y: number) => [number, number],
  joints: number[],
  torso: number,
  geo: { links: number[]; shoulderOffset: number; baseHeight: number },
  color: string,
): void {
  let d = 0;
  let z = geo.baseHeight + torso;
  let angle = 0;
  ctx.strokeStyle = color;
  ctx.lineWidth = 4;
  ctx.beginPath();
  const [sx, sy] = toPx(0, 0);
  ctx.moveTo(sx, sy);
  const [tx, ty] = toPx(0, z);
  ctx.lineTo(tx, ty);       // torso mast
  for (let i = 0; i < joints.length; i++) {
    angle += joints[i];
    d += geo.links[i] * Math.cos(angle);
    z += geo.links[i] * Math.sin(angle);
    const [px, py] = toPx(d, z);
    ctx.lineTo(px, py);
  }
  ctx.stroke();
  ctx.lineWidth = 1;
}
