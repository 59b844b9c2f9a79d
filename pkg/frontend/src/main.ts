/**
 * Browser entry: wire a canvas, a chart panel and pointer events to a
 * steering session.  Browsers cannot open raw TCP sockets, so the page must
 * be handed a Transport adapter that tunnels the line protocol unchanged
 * (for local use, any TCP-to-WebSocket line forwarder works); everything
 * above the transport speaks the service protocol exactly.
 */

import { SteeringClient } from "./client.js";
import { FIGURE_A_PLAN, circleTargets, runAutopilot } from "./autopilot.js";
import { exportChartCsv } from "./chart.js";
import { renderChartPanel } from "./chart.js";
import { TargetThrottle } from "./drag.js";
import { Transport } from "./protocol.js";
import { Context2D, fitCamera, renderScene, screenToWorld } from "./render.js";
import { ViewState, applyState, initViewState } from "./viewstate.js";

export interface SceneChoice {
  name: string;
  scene: Record<string, unknown>;
}

export const SCENE_CHOICES: SceneChoice[] = [
  {
    name: "half-circle",
    scene: {
      dimension: 2,
      snake: { kind: "preset", name: "half-circle" },
      curve: { kind: "spline", points: [[2.0, 0.0], [2.0, 0.0]] },
      solver: { step: 1e-3 },
    },
  },
  {
    name: "bivalued tent",
    scene: {
      dimension: 2,
      snake: { kind: "tent" },
      curve: { kind: "spline", points: [[2.0, 0.0], [2.0, 0.0]] },
    },
  },
];

export class SteeringApp {
  private client: SteeringClient;
  private view: ViewState | null = null;
  private throttle: TargetThrottle;
  private dragging = false;

  constructor(
    transport: Transport,
    private readonly canvas: { ctx: Context2D; width: number; height: number },
    private readonly chartCtx: Context2D | null = null,
  ) {
    this.client = new SteeringClient(transport);
    this.throttle = new TargetThrottle((p) => void this.sendTarget(p), { maxRate: 120 });
  }

  async connect(choice: SceneChoice): Promise<void> {
    const init = await this.client.init(choice.scene);
    this.view = initViewState(init);
    this.draw();
  }

  private async sendTarget(point: number[]): Promise<void> {
    if (!this.view) return;
    const state = await this.client.target(point, Date.now());
    this.view = applyState(this.view, state, point);
    this.draw();
  }

  pointerDown(): void {
    this.dragging = true;
  }

  async pointerUp(): Promise<void> {
    this.dragging = false;
    this.throttle.flush();
    if (!this.view) return;
    const state = await this.client.finish();
    this.view = applyState(this.view, state);
    this.draw();
  }

  pointerMove(x: number, y: number): void {
    if (!this.dragging || !this.view) return;
    const cam = fitCamera(this.view, this.canvas.width, this.canvas.height);
    this.throttle.push([...screenToWorld(cam, x, y)]);
  }

  async autopilot(turns: number): Promise<void> {
    if (!this.view) return;
    const targets = circleTargets({ ...FIGURE_A_PLAN, turns });
    let i = 0;
    await runAutopilot(this.client, targets, (state) => {
      this.view = applyState(this.view!, state, targets[Math.min(i, targets.length - 1)]);
      i += 1;
      this.draw();
    });
  }

  async exportCsv(): Promise<string> {
    return exportChartCsv(await this.client.exportCsv());
  }

  private draw(): void {
    if (!this.view) return;
    renderScene(this.canvas.ctx, this.view);
    if (this.chartCtx) renderChartPanel(this.chartCtx, this.view.loopChart);
  }
}

/** Attach to a real DOM when running in a browser with a transport bridge. */
export function mount(transport: Transport, doc: Document): SteeringApp {
  const canvas = doc.getElementById("snake-canvas") as HTMLCanvasElement;
  const chart = doc.getElementById("chart-canvas") as HTMLCanvasElement | null;
  const ctx = canvas.getContext("2d") as unknown as Context2D;
  const chartCtx = chart ? (chart.getContext("2d") as unknown as Context2D) : null;
  const app = new SteeringApp(
    transport,
    { ctx, width: canvas.width, height: canvas.height },
    chartCtx,
  );
  canvas.addEventListener("pointerdown", () => app.pointerDown());
  canvas.addEventListener("pointerup", () => void app.pointerUp());
  canvas.addEventListener("pointermove", (ev: PointerEvent) => {
    const rect = canvas.getBoundingClientRect();
    app.pointerMove(ev.clientX - rect.left, ev.clientY - rect.top);
  });
  return app;
}
