/** Node TCP transport for the steering protocol (tests and autopilot). */

import * as net from "node:net";

import { LineSplitter, Transport } from "./protocol.js";

export class TcpTransport implements Transport {
  private socket: net.Socket;
  private splitter: LineSplitter;
  private lineHandler: (line: string) => void = () => {};
  private closeHandler: () => void = () => {};

  private constructor(socket: net.Socket) {
    this.socket = socket;
    this.splitter = new LineSplitter((line) => this.lineHandler(line));
    socket.setEncoding("utf-8");
    socket.on("data", (chunk: string) => this.splitter.push(chunk));
    socket.on("close", () => this.closeHandler());
  }

  static connect(host: string, port: number): Promise<TcpTransport> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port });
      socket.once("connect", () => resolve(new TcpTransport(socket)));
      socket.once("error", reject);
    });
  }

  send(line: string): void {
    this.socket.write(line);
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }

  close(): void {
    this.socket.end();
    this.socket.destroy();
  }
}
