/**
 * Pure mapping from user gestures to protocol commands, given the last
 * acknowledged view state.  Returning null means the gesture is a no-op
 * (the UI never fabricates state the server has not confirmed).
 */

import { Command } from "./protocol.js";
import { ViewState, isEmpty, isFood } from "./state.js";

export type Tool = "place" | "move" | "remove" | "inspect";

export function clickCommand(
  tool: Tool, cell: [number, number], vs: ViewState,
): Command | null {
  const [x, y] = cell;
  switch (tool) {
    case "place":
      return { type: "place_food", at: [x, y] };
    case "remove":
      return isFood(vs, x, y) ? { type: "remove_food", at: [x, y] } : null;
    default:
      return null;
  }
}

export function dragCommand(
  tool: Tool, from: [number, number], to: [number, number], vs: ViewState,
): Command | null {
  if (tool !== "move") return null;
  if (!isFood(vs, from[0], from[1])) return null;
  if (from[0] === to[0] && from[1] === to[1]) return null;
  return { type: "move_food", from, to };
}

export function paramCommand(name: string, value: number): Command {
  return { type: "set_param", name, value };
}

export function describeCell(vs: ViewState, cell: [number, number]): string {
  const [x, y] = cell;
  if (isFood(vs, x, y)) return `(${x},${y}) food`;
  const c = vs.cells.get(`${x},${y}`);
  if (!c) return `(${x},${y}) empty`;
  if (vs.algo === "compression") {
    const names = ["D", "C", "C_G", "C_F", "C_GF", "DT"];
    return `(${x},${y}) ${names[c.state] ?? c.state}`;
  }
  if (c.state === 0) return `(${x},${y}) dispersion`;
  const base = (c.state - 1) % 7;
  const ver = c.state > 7 ? "*" : "";
  return `(${x},${y}) ${base}${ver} dir ${c.dir}`;
}

// isEmpty re-exported for the toolbar's hover hints
export { isEmpty };
