import { describe, expect, it } from "vitest";

import { LineSplitter, decodeMessage, encodeMessage } from "../src/protocol.js";

describe("message framing", () => {
  it("round-trips a message", () => {
    const msg = { type: "target" as const, payload: { point: [2.0, 0.1], timestamp: 5 } };
    const line = encodeMessage(msg);
    expect(line.endsWith("\n")).toBe(true);
    expect(decodeMessage(line.trim())).toEqual(msg);
  });

  it("rejects malformed frames", () => {
    expect(() => decodeMessage("42")).toThrow();
    expect(() => decodeMessage("{\"seq\": 1}")).toThrow();
  });
});

describe("line splitter", () => {
  it("reassembles partial chunks", () => {
    const seen: string[] = [];
    const splitter = new LineSplitter((l) => seen.push(l));
    splitter.push('{"type":"st');
    splitter.push('ate"}\n{"type":"init"}\n{"ty');
    splitter.push('pe":"export"}\n');
    expect(seen).toEqual(['{"type":"state"}', '{"type":"init"}', '{"type":"export"}']);
  });

  it("skips blank lines", () => {
    const seen: string[] = [];
    const splitter = new LineSplitter((l) => seen.push(l));
    splitter.push("\n\n{\"type\":\"state\"}\n\n");
    expect(seen).toHaveLength(1);
  });
});
