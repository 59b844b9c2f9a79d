/**
 * Request/reply client for a steering session.  The service answers every
 * message with exactly one reply in order, so a FIFO of pending resolvers is
 * enough; state sequence numbers are checked to be strictly increasing.
 */

import {
  InitPayload,
  Message,
  StatePayload,
  Transport,
  decodeMessage,
  encodeMessage,
} from "./protocol.js";

export class ProtocolError extends Error {}

export class SteeringClient {
  private pending: Array<{
    resolve: (msg: Message) => void;
    reject: (err: Error) => void;
  }> = [];
  private lastSeq = -1;

  constructor(private readonly transport: Transport) {
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => this.flushPending(new ProtocolError("connection closed")));
  }

  private handleLine(line: string): void {
    const msg = decodeMessage(line);
    const waiter = this.pending.shift();
    if (!waiter) return; // unsolicited message: protocol misuse, ignore
    if (msg.type === "state") {
      const seq = msg.seq ?? -1;
      if (seq <= this.lastSeq) {
        waiter.reject(new ProtocolError(`sequence went backwards: ${seq} after ${this.lastSeq}`));
        return;
      }
      this.lastSeq = seq;
    }
    waiter.resolve(msg);
  }

  private flushPending(err: Error): void {
    for (const waiter of this.pending.splice(0)) waiter.reject(err);
  }

  private request(msg: Message): Promise<Message> {
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.transport.send(encodeMessage(msg));
    });
  }

  private expect<T>(msg: Message, type: string): T {
    if (msg.type === "error") {
      const payload = msg.payload as { message?: string } | undefined;
      throw new ProtocolError(payload?.message ?? "service error");
    }
    if (msg.type !== type) {
      throw new ProtocolError(`expected ${type}, got ${msg.type}`);
    }
    return msg.payload as T;
  }

  async init(scene: Record<string, unknown>, stepsPerSegment = 8): Promise<InitPayload> {
    const msg = await this.request({
      type: "init",
      payload: { scene, steps_per_segment: stepsPerSegment },
    });
    return this.expect<InitPayload>(msg, "init");
  }

  async target(point: number[], timestamp: number): Promise<StatePayload> {
    const msg = await this.request({ type: "target", payload: { point, timestamp } });
    return this.expect<StatePayload>(msg, "state");
  }

  async finish(): Promise<StatePayload> {
    return this.expect<StatePayload>(await this.request({ type: "finish" }), "state");
  }

  async reset(): Promise<StatePayload> {
    return this.expect<StatePayload>(await this.request({ type: "reset" }), "state");
  }

  /** Export the trajectory CSV exactly as the service produced it. */
  async exportCsv(): Promise<string> {
    const msg = await this.request({ type: "export" });
    const payload = this.expect<{ csv: string }>(msg, "export");
    return payload.csv;
  }

  close(): void {
    this.transport.close();
  }
}
