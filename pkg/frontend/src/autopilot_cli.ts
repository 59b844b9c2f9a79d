/**
 * Node entry: connect to a running steering service, play the charmed-circle
 * script, print a summary line and write the exported trajectory CSV.
 *
 *   node dist/autopilot_cli.js --port 8731 [--turns 3] [--out export.csv]
 */

import * as fs from "node:fs";

import { FIGURE_A_PLAN, circleTargets, runAutopilot } from "./autopilot.js";
import { SteeringClient } from "./client.js";
import { exportChartCsv } from "./chart.js";
import { TcpTransport } from "./transport.js";
import { applyState, initViewState } from "./viewstate.js";

function argValue(flag: string): string | undefined {
  const idx = process.argv.indexOf(flag);
  return idx >= 0 ? process.argv[idx + 1] : undefined;
}

const HALF_CIRCLE_SCENE = {
  dimension: 2,
  snake: { kind: "preset", name: "half-circle" },
  curve: { kind: "spline", points: [[2.0, 0.0], [2.0, 0.0]] },
  solver: { step: 1e-3 },
};

async function main(): Promise<void> {
  const port = Number(argValue("--port") ?? "8731");
  const turns = Number(argValue("--turns") ?? "1");
  const out = argValue("--out") ?? "autopilot_export.csv";

  const transport = await TcpTransport.connect("127.0.0.1", port);
  const client = new SteeringClient(transport);
  const init = await client.init(HALF_CIRCLE_SCENE);
  let view = initViewState(init);

  const plan = { ...FIGURE_A_PLAN, turns };
  const targets = circleTargets(plan);
  let i = 0;
  await runAutopilot(client, targets, (state) => {
    view = applyState(view, state, targets[Math.min(i, targets.length - 1)]);
    i += 1;
  });

  const csv = exportChartCsv(await client.exportCsv());
  fs.writeFileSync(out, csv);
  console.log(
    JSON.stringify({
      loops: view.loopCount,
      defect: view.defect,
      chart_points: view.loopChart.length,
      length_ok: view.lengthOk,
      export: out,
    }),
  );
  client.close();
}

main().catch((err) => {
  console.error(String(err));
  process.exit(1);
});
