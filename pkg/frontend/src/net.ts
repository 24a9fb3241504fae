/**
 * Socket wrapper: parses frames, assigns command ids, and invokes a single
 * message callback.  Reconnects with a capped backoff.
 */

import { Command, ServerMsg, encodeCommand, parseServerMsg } from "./protocol.js";

export class Connection {
  private ws: WebSocket | null = null;
  private nextId = 1;
  private backoff = 500;
  private closed = false;

  constructor(
    private url: string,
    private onMsg: (msg: ServerMsg) => void,
    private onStatus: (connected: boolean) => void,
  ) {}

  open(): void {
    this.closed = false;
    this.dial();
  }

  private dial(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.backoff = 500;
      this.onStatus(true);
    };
    ws.onmessage = (ev) => {
      try {
        this.onMsg(parseServerMsg(String(ev.data)));
      } catch (e) {
        console.warn("dropped frame:", e);
      }
    };
    ws.onclose = () => {
      this.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.dial(), this.backoff);
        this.backoff = Math.min(this.backoff * 2, 8000);
      }
    };
    ws.onerror = () => ws.close();
  }

  send(cmd: Command): number | null {
    if (!this.ws || this.ws.readyState !== WebSocket.OPEN) return null;
    const id = this.nextId++;
    this.ws.send(encodeCommand(cmd, id));
    return id;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
