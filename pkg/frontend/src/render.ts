/**
 * Canvas drawing for a steering session: snake polyline, target trail,
 * admissible ball, defect readout, clamp flag.  Works against a minimal 2D
 * context interface so tests can record the draw calls without a DOM.
 */

import { ViewState } from "./viewstate.js";

export interface Context2D {
  canvas: { width: number; height: number };
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
}

export interface Camera {
  scale: number;
  cx: number;
  cy: number;
}

export function fitCamera(view: ViewState, width: number, height: number): Camera {
  const half = 1.15 * view.snakeLength;
  return { scale: Math.min(width, height) / (2 * half), cx: width / 2, cy: height / 2 };
}

export function toScreen(cam: Camera, p: number[]): [number, number] {
  return [cam.cx + cam.scale * p[0], cam.cy - cam.scale * p[1]];
}

export function screenToWorld(cam: Camera, x: number, y: number): [number, number] {
  return [(x - cam.cx) / cam.scale, (cam.cy - y) / cam.scale];
}

function drawPolyline(ctx: Context2D, cam: Camera, pts: number[][]): void {
  if (pts.length === 0) return;
  ctx.beginPath();
  const [x0, y0] = toScreen(cam, pts[0]);
  ctx.moveTo(x0, y0);
  for (let i = 1; i < pts.length; i++) {
    const [x, y] = toScreen(cam, pts[i]);
    ctx.lineTo(x, y);
  }
  ctx.stroke();
}

export function renderScene(ctx: Context2D, view: ViewState): void {
  const { width, height } = ctx.canvas;
  const cam = fitCamera(view, width, height);

  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);

  // admissible ball (outer) and curvature-critical circle (bivalued inner)
  ctx.setLineDash([5, 4]);
  ctx.strokeStyle = "#9db4d0";
  ctx.lineWidth = 1;
  if (view.ballRadius > 0) {
    ctx.beginPath();
    ctx.arc(cam.cx, cam.cy, cam.scale * view.ballRadius, 0, 2 * Math.PI);
    ctx.stroke();
  }
  if (view.bivalued) {
    ctx.strokeStyle = "#d0a79d";
    ctx.beginPath();
    ctx.arc(cam.cx, cam.cy, cam.scale * Math.max(view.innerRadius, 0.004), 0, 2 * Math.PI);
    ctx.stroke();
  }
  ctx.setLineDash([]);

  // target trail
  ctx.strokeStyle = "#bbbbbb";
  ctx.lineWidth = 1;
  drawPolyline(ctx, cam, view.targetTrail);

  // the snake itself
  ctx.strokeStyle = view.degraded ? "#aa2222" : "#102030";
  ctx.lineWidth = 2;
  drawPolyline(ctx, cam, view.polyline);

  // snout marker
  const [sx, sy] = toScreen(cam, view.snout);
  ctx.fillStyle = "#cc0000";
  ctx.beginPath();
  ctx.arc(sx, sy, 4, 0, 2 * Math.PI);
  ctx.fill();

  // readouts
  ctx.fillStyle = "#202020";
  ctx.font = "12px monospace";
  ctx.fillText(`defect ${view.defect.toExponential(2)}`, 8, 16);
  ctx.fillText(`loops ${view.loopCount}  steps ${view.stepCount}`, 8, 32);
  if (view.clamped) ctx.fillText("CLAMPED to admissible ball", 8, 48);
  if (view.degraded) ctx.fillText(`PAUSED: ${view.degraded}`, 8, 64);
  if (!view.lengthOk) ctx.fillText("WARNING: polyline length drifted", 8, 80);
}
