/**
 * Wire protocol of the steering service: line-delimited JSON messages
 * {type, seq, payload} over a byte stream.  The transport is abstract so the
 * same client runs over a Node TCP socket (tests, autopilot) or any injected
 * stream adapter.
 */

export type MessageType = "init" | "target" | "finish" | "reset" | "export" | "state" | "error";

export interface Message {
  type: MessageType;
  seq?: number;
  payload?: Record<string, unknown>;
}

export interface InitPayload {
  dimension: number;
  length: number;
  ball_radius: number;
  bivalued_mode: boolean;
  inner_radius: number;
  snake: number[][];
  snout: number[];
  defect: number;
}

export interface ChartPoint {
  v: number[];
  theta: number;
}

export interface StatePayload {
  snake: number[][];
  snout: number[];
  defect: number;
  step_count: number;
  clamped: boolean;
  pending_targets: number;
  winding: number;
  loop_count: number;
  degraded: string | null;
  chart?: ChartPoint;
  reset?: boolean;
}

export interface Transport {
  send(line: string): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export function encodeMessage(msg: Message): string {
  return JSON.stringify(msg) + "\n";
}

export function decodeMessage(line: string): Message {
  const parsed = JSON.parse(line);
  if (typeof parsed !== "object" || parsed === null || typeof parsed.type !== "string") {
    throw new Error(`malformed message: ${line}`);
  }
  return parsed as Message;
}

/** Splits a byte stream into newline-delimited frames, buffering partials. */
export class LineSplitter {
  private buffer = "";

  constructor(private readonly handler: (line: string) => void) {}

  push(chunk: string): void {
    this.buffer += chunk;
    for (;;) {
      const idx = this.buffer.indexOf("\n");
      if (idx < 0) break;
      const line = this.buffer.slice(0, idx).trim();
      this.buffer = this.buffer.slice(idx + 1);
      if (line.length > 0) this.handler(line);
    }
  }
}
