/**
 * Wire protocol shared with the simulation service: one JSON document per
 * WebSocket text frame, every message tagged {v: 1, type: ...}.
 */

export const PROTOCOL_VERSION = 1;

/** x, y, state code, parent direction (-1 for none / vacated cell). */
export type Cell = [number, number, number, number];

export interface Metrics {
  step: number;
  phi: number;
  phi_c: number;
  phi_dt: number;
  phi_t: number;
  cluster_count: number;
  n_residual: number;
  perimeter: number | null;
  alpha: number | null;
  inconsistency: number;
  stage: number;
  aggregation: number;
  n_by_state: Record<string, number>;
}

interface Base {
  v: number;
}

export interface HelloMsg extends Base {
  type: "hello";
  step: number;
  config: { side: number; n: number; algo: string; params: Record<string, number> };
}

export interface SnapshotMsg extends Base {
  type: "snapshot";
  step: number;
  side: number;
  algo: "compression" | "spiral";
  food: [number, number][];
  particles: Cell[];
  metrics: Metrics;
  running: boolean;
  speed: number;
  params: Record<string, number>;
}

export interface DeltaMsg extends Base {
  type: "delta";
  step: number;
  changes: Cell[];
  food: [number, number][];
  metrics: Metrics;
  running: boolean;
  speed: number;
  params: Record<string, number>;
}

export interface AckMsg extends Base {
  type: "ack";
  id: number | null;
  cmd: string;
  step: number;
}

export interface ErrorMsg extends Base {
  type: "error";
  id: number | null;
  reason: string;
}

export interface LogMsg extends Base {
  type: "log";
  id: number | null;
  log: unknown;
}

export type ServerMsg = HelloMsg | SnapshotMsg | DeltaMsg | AckMsg | ErrorMsg | LogMsg;

const SERVER_TYPES = new Set(["hello", "snapshot", "delta", "ack", "error", "log"]);

export function parseServerMsg(raw: string): ServerMsg {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new Error("malformed JSON frame");
  }
  const m = data as Record<string, unknown>;
  if (typeof m !== "object" || m === null) throw new Error("not an object");
  if (m.v !== PROTOCOL_VERSION) throw new Error(`unsupported version ${m.v}`);
  if (typeof m.type !== "string" || !SERVER_TYPES.has(m.type)) {
    throw new Error(`unknown message type ${m.type}`);
  }
  return data as ServerMsg;
}

export type Command =
  | { type: "place_food"; at: [number, number] }
  | { type: "move_food"; from: [number, number]; to: [number, number] }
  | { type: "remove_food"; at: [number, number] }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "step"; k: number }
  | { type: "set_speed"; sps: number }
  | { type: "set_param"; name: string; value: number }
  | { type: "get_log" }
  | { type: "snapshot" };

export function encodeCommand(cmd: Command, id: number): string {
  return JSON.stringify({ id, ...cmd });
}
