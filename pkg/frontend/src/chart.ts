/**
 * Holonomy chart panel: scatter of the per-loop boost coordinates (v1, v2)
 * and the angle theta against the loop index, mirroring the per-turn group
 * chart of the service.  Export is a pure pass-through of the service CSV.
 */

import { ChartPoint } from "./protocol.js";
import { Context2D } from "./render.js";

export interface ChartBounds {
  vMax: number;
  thetaMin: number;
  thetaMax: number;
}

export function chartBounds(points: ChartPoint[]): ChartBounds {
  let vMax = 1e-9;
  let thetaMin = 0;
  let thetaMax = 0;
  for (const p of points) {
    vMax = Math.max(vMax, Math.abs(p.v[0]), Math.abs(p.v[1]));
    thetaMin = Math.min(thetaMin, p.theta);
    thetaMax = Math.max(thetaMax, p.theta);
  }
  return { vMax, thetaMin, thetaMax };
}

export function renderChartPanel(ctx: Context2D, points: ChartPoint[]): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);
  ctx.fillStyle = "#202020";
  ctx.font = "12px monospace";
  if (points.length === 0) {
    ctx.fillText("no completed loops yet", 8, 16);
    return;
  }
  const bounds = chartBounds(points);
  const half = width / 2;

  // left: (v1, v2) scatter
  const sScale = (half - 20) / (2 * bounds.vMax);
  for (const p of points) {
    const x = half / 2 + sScale * p.v[0];
    const y = height / 2 - sScale * p.v[1];
    ctx.fillRect(x - 1, y - 1, 2, 2);
  }
  ctx.fillText("v per loop", 8, 16);

  // right: theta against loop index
  const span = Math.max(bounds.thetaMax - bounds.thetaMin, 1e-9);
  for (let i = 0; i < points.length; i++) {
    const x = half + 10 + ((half - 20) * i) / Math.max(points.length - 1, 1);
    const y = height - 12 - ((height - 24) * (points[i].theta - bounds.thetaMin)) / span;
    ctx.fillRect(x - 1, y - 1, 2, 2);
  }
  ctx.fillText("theta vs n", half + 10, 16);
}

/** The UI export is byte-identical to the service CSV. */
export function exportChartCsv(serviceCsv: string): string {
  return serviceCsv;
}
