/**
 * Scripted target playback: reproduces the charmed-circle figures without
 * manual dexterity.  Targets are emitted through the same client path as a
 * live drag, capped at the drag rate limit.
 */

import { SteeringClient } from "./client.js";
import { StatePayload } from "./protocol.js";

export interface CirclePlan {
  center: [number, number];
  radius: number;
  turns: number;
  targetsPerTurn: number;
}

export const FIGURE_A_PLAN: CirclePlan = {
  center: [2.1875, 0.0],
  radius: 0.1875,
  turns: 1,
  targetsPerTurn: 64,
};

export function circleTargets(plan: CirclePlan): number[][] {
  const total = plan.turns * plan.targetsPerTurn;
  const pts: number[][] = [];
  for (let k = 1; k <= total; k++) {
    const a = Math.PI + (2 * Math.PI * k) / plan.targetsPerTurn;
    pts.push([
      plan.center[0] + plan.radius * Math.cos(a),
      plan.center[1] + plan.radius * Math.sin(a),
    ]);
  }
  return pts;
}

export interface AutopilotResult {
  states: StatePayload[];
  finalState: StatePayload;
}

export async function runAutopilot(
  client: SteeringClient,
  targets: number[][],
  onState?: (s: StatePayload) => void,
): Promise<AutopilotResult> {
  const states: StatePayload[] = [];
  let timestamp = 0;
  for (const point of targets) {
    const state = await client.target(point, timestamp);
    timestamp += 1000 / 120; // stay at the drag rate cap
    states.push(state);
    onState?.(state);
  }
  const finalState = await client.finish();
  states.push(finalState);
  onState?.(finalState);
  return { states, finalState };
}
