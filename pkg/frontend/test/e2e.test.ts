/**
 * End-to-end against the real Python service: a scripted circular drag must
 * reproduce the batch `snakecharmer lift` result on the equivalent spline
 * scene within 1e-8, and the UI chart export must equal the service export
 * byte for byte.
 */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { FIGURE_A_PLAN, circleTargets, runAutopilot } from "../src/autopilot.js";
import { SteeringClient } from "../src/client.js";
import { exportChartCsv } from "../src/chart.js";
import { encodeMessage, Message } from "../src/protocol.js";
import { TcpTransport } from "../src/transport.js";
import { applyState, initViewState } from "../src/viewstate.js";

const SCENE = {
  dimension: 2,
  snake: { kind: "preset", name: "half-circle" },
  curve: { kind: "spline", points: [[2.0, 0.0], [2.0, 0.0]] },
  solver: { step: 1e-3 },
};

let service: ChildProcess;
let port = 0;

beforeAll(async () => {
  service = spawn("python3", ["-m", "snakecharmer.service", "--port", "0"], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  port = await new Promise<number>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("service did not announce")), 20000);
    service.stdout!.once("data", (chunk: Buffer) => {
      clearTimeout(timer);
      resolve(JSON.parse(chunk.toString().trim()).listening as number);
    });
    service.once("exit", () => reject(new Error("service exited early")));
  });
}, 30000);

afterAll(() => {
  service?.kill();
});

async function connect(): Promise<SteeringClient> {
  return new SteeringClient(await TcpTransport.connect("127.0.0.1", port));
}

describe("steering UI against the live service", () => {
  it("renders the half-circle scene from the init message", async () => {
    const client = await connect();
    const init = await client.init(SCENE);
    const view = initViewState(init);
    expect(view.snout[0]).toBeCloseTo(2.0, 9);
    expect(view.ballRadius).toBeCloseTo(Math.PI, 9);
    expect(view.lengthOk).toBe(true);
    client.close();
  }, 30000);

  it("scripted circular drag matches the batch lift within 1e-8", async () => {
    const client = await connect();
    const init = await client.init(SCENE, 16);
    let view = initViewState(init);

    const plan = { ...FIGURE_A_PLAN, targetsPerTurn: 64 };
    const targets = circleTargets(plan);
    let i = 0;
    const { finalState } = await runAutopilot(client, targets, (state) => {
      view = applyState(view, state, targets[Math.min(i, targets.length - 1)]);
      i += 1;
    });
    expect(finalState.degraded).toBeNull();
    expect(view.loopCount).toBe(1);
    expect(view.loopChart.length).toBe(1);
    expect(view.lengthOk).toBe(true);
    expect(view.defect).toBeLessThan(1e-8);

    const uiCsv = exportChartCsv(await client.exportCsv());
    client.close();

    // batch path: the same targets as a spline scene through the CLI
    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "charm-e2e-"));
    const points = [[2.0, 0.0], ...targets];
    const sceneFile = path.join(tmp, "scene.yaml");
    fs.writeFileSync(
      sceneFile,
      JSON.stringify({
        dimension: 2,
        snake: { kind: "preset", name: "half-circle" },
        curve: { kind: "spline", points },
        solver: { step: 1e-3 },
      }),
    );
    const run = spawnSync(
      "python3",
      ["-m", "snakecharmer.cli", "lift", sceneFile, "--out-dir", tmp],
      { encoding: "utf-8" },
    );
    expect(run.status, run.stderr).toBe(0);
    const batch = fs.readFileSync(path.join(tmp, "trajectory.csv"), "utf-8").trim().split("\n");
    const header = batch[0].split(",");
    const last = batch[batch.length - 1].split(",").map(Number);
    const pick = (col: string) => last[header.indexOf(col)];

    const uiRows = uiCsv.trim().split("\n");
    expect(uiRows[0]).toBe(batch[0]); // identical column layout
    const uiLast = uiRows[uiRows.length - 1].split(",").map(Number);
    const uiPick = (col: string) => uiLast[header.indexOf(col)];

    // the final group chart pins down the final configuration
    for (const col of ["v_1", "v_2", "theta"]) {
      expect(Math.abs(uiPick(col) - pick(col))).toBeLessThan(1e-8);
    }
    expect(Math.abs(uiPick("gamma_1") - pick("gamma_1"))).toBeLessThan(1e-12);
  }, 120000);

  it("UI export equals a raw replay export byte for byte", async () => {
    const targets = circleTargets({ ...FIGURE_A_PLAN, targetsPerTurn: 24 });

    // first pass: through the UI client
    const client = await connect();
    await client.init(SCENE);
    await runAutopilot(client, targets);
    const uiCsv = exportChartCsv(await client.exportCsv());
    client.close();

    // second pass: replay the identical message log over a raw transport
    const transport = await TcpTransport.connect("127.0.0.1", port);
    const replies: string[] = [];
    let resolveDone: (() => void) | null = null;
    const expected = targets.length + 3; // init + targets + finish + export
    transport.onLine((line) => {
      replies.push(line);
      if (replies.length === expected && resolveDone) resolveDone();
    });
    const messages: Message[] = [
      { type: "init", payload: { scene: SCENE, steps_per_segment: 8 } },
      ...targets.map((point, k): Message => ({
        type: "target",
        payload: { point, timestamp: (k * 1000) / 120 },
      })),
      { type: "finish" },
      { type: "export" },
    ];
    for (const msg of messages) transport.send(encodeMessage(msg));
    await new Promise<void>((resolve) => {
      resolveDone = resolve;
      if (replies.length >= expected) resolve();
    });
    const exportReply = JSON.parse(replies[replies.length - 1]);
    transport.close();

    expect(exportReply.type).toBe("export");
    expect(exportReply.payload.csv).toBe(uiCsv);
  }, 60000);

  it("clamp indicator fires on targets outside the admissible ball", async () => {
    const client = await connect();
    const init = await client.init(SCENE);
    let view = initViewState(init);
    const state = await client.target([10.0, 0.0], 0);
    view = applyState(view, state, [10.0, 0.0]);
    expect(view.clamped).toBe(true);
    client.close();
  }, 30000);
});
