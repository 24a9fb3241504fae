/**
 * Triangular-lattice embedding and picking.  A cell (x, y) sits at world
 * point (x * sqrt(3)/2, y - x/2); the six lattice directions come out at
 * 60-degree spacing.  The camera maps world points to canvas pixels.
 */

export const COL = Math.sqrt(3) / 2;

export interface Camera {
  ox: number; // world x at the canvas centre
  oy: number;
  scale: number; // pixels per lattice unit
}

export function cellToWorld(x: number, y: number): [number, number] {
  return [x * COL, y - x / 2];
}

export function worldToCell(wx: number, wy: number, side: number): [number, number] {
  const xf = wx / COL;
  const yf = wy + xf / 2;
  let best: [number, number] = [0, 0];
  let bestD = Infinity;
  for (const cx of [Math.floor(xf), Math.ceil(xf)]) {
    for (const cy of [Math.floor(yf), Math.ceil(yf)]) {
      const [px, py] = cellToWorld(cx, cy);
      const d = (px - wx) * (px - wx) + (py - wy) * (py - wy);
      if (d < bestD) {
        bestD = d;
        best = [cx, cy];
      }
    }
  }
  const mod = (v: number) => ((v % side) + side) % side;
  return [mod(best[0]), mod(best[1])];
}

export function cellToScreen(
  cam: Camera, width: number, height: number, x: number, y: number,
): [number, number] {
  const [wx, wy] = cellToWorld(x, y);
  return [
    width / 2 + (wx - cam.ox) * cam.scale,
    height / 2 + (wy - cam.oy) * cam.scale,
  ];
}

export function screenToCell(
  cam: Camera, width: number, height: number, px: number, py: number, side: number,
): [number, number] {
  const wx = cam.ox + (px - width / 2) / cam.scale;
  const wy = cam.oy + (py - height / 2) / cam.scale;
  return worldToCell(wx, wy, side);
}

/** Camera framing the whole torus with a small margin. */
export function fitCamera(side: number, width: number, height: number): Camera {
  const w = side * COL;
  const h = side * 1.5; // sheared row extent
  const scale = Math.min(width / (w + 2), height / (h + 2));
  return { ox: (side * COL) / 2, oy: side / 4, scale };
}

export function pan(cam: Camera, dxPixels: number, dyPixels: number): Camera {
  return {
    ...cam,
    ox: cam.ox - dxPixels / cam.scale,
    oy: cam.oy - dyPixels / cam.scale,
  };
}

export function zoom(cam: Camera, factor: number): Camera {
  const scale = Math.min(200, Math.max(2, cam.scale * factor));
  return { ...cam, scale };
}
