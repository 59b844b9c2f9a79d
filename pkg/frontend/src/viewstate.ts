/**
 * Render model of one steering session.  The UI never computes dynamics:
 * every field here is copied or accumulated from service messages, and the
 * chart collects one (v, theta) sample per completed loop.
 */

import { ChartPoint, InitPayload, StatePayload } from "./protocol.js";

export interface ViewState {
  dimension: number;
  snakeLength: number;
  ballRadius: number;
  innerRadius: number;
  bivalued: boolean;
  polyline: number[][];
  targetTrail: number[][];
  snout: number[];
  defect: number;
  stepCount: number;
  clamped: boolean;
  degraded: string | null;
  loopCount: number;
  winding: number;
  /** one chart sample per completed loop */
  loopChart: ChartPoint[];
  /** latest live chart point */
  chart: ChartPoint | null;
  /** rendered polyline length stays within 1% of the snake length */
  lengthOk: boolean;
}

export function polylineLength(points: number[][]): number {
  let total = 0;
  for (let i = 1; i < points.length; i++) {
    let sq = 0;
    for (let j = 0; j < points[i].length; j++) {
      const d = points[i][j] - points[i - 1][j];
      sq += d * d;
    }
    total += Math.sqrt(sq);
  }
  return total;
}

function lengthWithinOnePercent(points: number[][], expected: number): boolean {
  const got = polylineLength(points);
  return Math.abs(got - expected) <= 0.01 * expected;
}

export function initViewState(payload: InitPayload): ViewState {
  return {
    dimension: payload.dimension,
    snakeLength: payload.length,
    ballRadius: payload.ball_radius,
    innerRadius: payload.inner_radius,
    bivalued: payload.bivalued_mode,
    polyline: payload.snake,
    targetTrail: [payload.snout],
    snout: payload.snout,
    defect: payload.defect,
    stepCount: 0,
    clamped: false,
    degraded: null,
    loopCount: 0,
    winding: 0,
    loopChart: [],
    chart: null,
    lengthOk: lengthWithinOnePercent(payload.snake, payload.length),
  };
}

export function applyState(view: ViewState, payload: StatePayload, target?: number[]): ViewState {
  const loopCount = payload.loop_count;
  const loopChart = view.loopChart.slice();
  if (payload.reset) {
    loopChart.length = 0;
  } else if (payload.chart && loopCount > view.loopCount) {
    loopChart.push(payload.chart);
  }
  return {
    ...view,
    polyline: payload.snake,
    targetTrail: payload.reset
      ? [payload.snout]
      : target
        ? [...view.targetTrail, target]
        : view.targetTrail,
    snout: payload.snout,
    defect: payload.defect,
    stepCount: payload.step_count,
    clamped: payload.clamped,
    degraded: payload.degraded,
    loopCount: payload.reset ? 0 : loopCount,
    winding: payload.reset ? 0 : payload.winding,
    chart: payload.chart ?? view.chart,
    loopChart,
    lengthOk: lengthWithinOnePercent(payload.snake, view.snakeLength),
  };
}
