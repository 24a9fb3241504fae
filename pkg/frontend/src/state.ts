/**
 * View model: the last acknowledged simulation state plus local UI bits.
 * Server messages are the only thing that mutates simulation-derived
 * state; commands are tracked as pending until their ack or error comes
 * back, and the renderer works off the dirty-cell set.
 */

import {
  Cell, Command, DeltaMsg, Metrics, ServerMsg, SnapshotMsg,
} from "./protocol.js";

export interface CellState {
  state: number;
  dir: number;
}

export interface ViewState {
  connected: boolean;
  side: number;
  algo: string;
  step: number;
  cells: Map<string, CellState>;
  food: Set<string>;
  metricsHistory: Metrics[];
  running: boolean;
  speed: number;
  params: Record<string, number>;
  pending: Map<number, Command>;
  toasts: { text: string; at: number }[];
  dirty: Set<string>;
  fullRedraw: boolean;
}

export const METRICS_CAP = 600;

export function key(x: number, y: number): string {
  return `${x},${y}`;
}

export function initialState(): ViewState {
  return {
    connected: false,
    side: 0,
    algo: "compression",
    step: 0,
    cells: new Map(),
    food: new Set(),
    metricsHistory: [],
    running: false,
    speed: 0,
    params: {},
    pending: new Map(),
    toasts: [],
    dirty: new Set(),
    fullRedraw: true,
  };
}

function pushMetrics(vs: ViewState, m: Metrics): void {
  vs.metricsHistory.push(m);
  if (vs.metricsHistory.length > METRICS_CAP) {
    vs.metricsHistory.splice(0, vs.metricsHistory.length - METRICS_CAP);
  }
}

function applySnapshot(vs: ViewState, msg: SnapshotMsg): void {
  vs.side = msg.side;
  vs.algo = msg.algo;
  vs.step = msg.step;
  vs.cells = new Map();
  for (const [x, y, state, dir] of msg.particles) {
    vs.cells.set(key(x, y), { state, dir });
  }
  vs.food = new Set(msg.food.map(([x, y]) => key(x, y)));
  vs.running = msg.running;
  vs.speed = msg.speed;
  vs.params = msg.params;
  pushMetrics(vs, msg.metrics);
  vs.fullRedraw = true;
  vs.dirty.clear();
}

function applyDelta(vs: ViewState, msg: DeltaMsg): void {
  if (msg.step < vs.step) return; // stale frame; snapshots reset the clock
  vs.step = msg.step;
  for (const [x, y, state, dir] of msg.changes as Cell[]) {
    const k = key(x, y);
    if (state < 0) {
      vs.cells.delete(k);
    } else {
      vs.cells.set(k, { state, dir });
    }
    vs.dirty.add(k);
  }
  const newFood = new Set(msg.food.map(([x, y]) => key(x, y)));
  for (const k of vs.food) if (!newFood.has(k)) vs.dirty.add(k);
  for (const k of newFood) if (!vs.food.has(k)) vs.dirty.add(k);
  vs.food = newFood;
  vs.running = msg.running;
  vs.speed = msg.speed;
  vs.params = msg.params;
  pushMetrics(vs, msg.metrics);
}

export function applyServer(vs: ViewState, msg: ServerMsg): ViewState {
  switch (msg.type) {
    case "hello":
      vs.connected = true;
      break;
    case "snapshot":
      applySnapshot(vs, msg);
      break;
    case "delta":
      applyDelta(vs, msg);
      break;
    case "ack":
      if (msg.id !== null) vs.pending.delete(msg.id);
      break;
    case "error": {
      if (msg.id !== null) vs.pending.delete(msg.id);
      vs.toasts.push({ text: msg.reason, at: Date.now() });
      if (vs.toasts.length > 5) vs.toasts.shift();
      break;
    }
    case "log":
      if (msg.id !== null) vs.pending.delete(msg.id);
      break;
  }
  return vs;
}

export function trackPending(vs: ViewState, id: number, cmd: Command): void {
  vs.pending.set(id, cmd);
}

export function cellAt(vs: ViewState, x: number, y: number): CellState | undefined {
  return vs.cells.get(key(x, y));
}

export function isFood(vs: ViewState, x: number, y: number): boolean {
  return vs.food.has(key(x, y));
}

export function isEmpty(vs: ViewState, x: number, y: number): boolean {
  return !vs.cells.has(key(x, y)) && !vs.food.has(key(x, y));
}
