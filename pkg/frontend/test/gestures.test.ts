import { describe, expect, it } from "vitest";

import { clickCommand, describeCell, dragCommand, paramCommand } from "../src/gestures.js";
import { applyServer, initialState } from "../src/state.js";
import { Metrics, ServerMsg } from "../src/protocol.js";

const metrics: Metrics = {
  step: 0, phi: 0, phi_c: 0, phi_dt: 0, phi_t: 0, cluster_count: 0,
  n_residual: 0, perimeter: null, alpha: null, inconsistency: 0, stage: 0,
  aggregation: 0, n_by_state: {},
};

function makeState() {
  const vs = initialState();
  const snap: ServerMsg = {
    v: 1, type: "snapshot", step: 0, side: 10, algo: "compression",
    food: [[4, 4]], particles: [[2, 2, 3, -1]], metrics,
    running: true, speed: 100, params: {},
  };
  applyServer(vs, snap);
  return vs;
}

describe("gestures", () => {
  it("click with the place tool emits place_food anywhere", () => {
    const vs = makeState();
    expect(clickCommand("place", [1, 1], vs))
      .toEqual({ type: "place_food", at: [1, 1] });
    // even on occupied cells: the server is the validator and the error
    // comes back as a toast
    expect(clickCommand("place", [2, 2], vs)).not.toBeNull();
  });

  it("remove tool only fires on food cells", () => {
    const vs = makeState();
    expect(clickCommand("remove", [4, 4], vs))
      .toEqual({ type: "remove_food", at: [4, 4] });
    expect(clickCommand("remove", [1, 1], vs)).toBeNull();
  });

  it("drag moves food only when starting on food", () => {
    const vs = makeState();
    expect(dragCommand("move", [4, 4], [5, 5], vs))
      .toEqual({ type: "move_food", from: [4, 4], to: [5, 5] });
    expect(dragCommand("move", [1, 1], [5, 5], vs)).toBeNull();
    expect(dragCommand("move", [4, 4], [4, 4], vs)).toBeNull();
  });

  it("sliders map to set_param", () => {
    expect(paramCommand("lambda", 1.5))
      .toEqual({ type: "set_param", name: "lambda", value: 1.5 });
  });

  it("inspect describes cells", () => {
    const vs = makeState();
    expect(describeCell(vs, [4, 4])).toContain("food");
    expect(describeCell(vs, [2, 2])).toContain("C_F");
    expect(describeCell(vs, [0, 0])).toContain("empty");
  });
});
