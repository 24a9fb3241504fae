/**
 * Canvas renderer: state-colored discs on the triangular grid, dirty-cell
 * repaint between full redraws.  Color scheme: dispersion yellow,
 * compression blue (red while holding a growth token), dissolution-wave
 * purple, food green and slightly larger.  Spiral worlds shade the base
 * labels from blue to red with a white ring on verified particles.
 */

import { Camera, cellToScreen } from "./hex.js";
import { CellState, ViewState, key } from "./state.js";

export const COLORS = {
  background: "#101418",
  grid: "#2a3139",
  dispersion: "#e0b400",
  compression: "#3182ce",
  token: "#e53e3e",
  wave: "#805ad5",
  food: "#38a169",
};

const SPIRAL_RAMP = ["#3182ce", "#4a7fd4", "#637cda", "#8c6fd0", "#b55cb8",
                     "#d84f93", "#e53e3e"];

export function cellColor(algo: string, c: CellState): { fill: string; ring: boolean } {
  if (algo === "compression") {
    switch (c.state) {
      case 0: return { fill: COLORS.dispersion, ring: false };
      case 2: case 4: return { fill: COLORS.token, ring: false };
      case 5: return { fill: COLORS.wave, ring: false };
      default: return { fill: COLORS.compression, ring: false };
    }
  }
  if (c.state === 0) return { fill: COLORS.dispersion, ring: false };
  const base = (c.state - 1) % 7;
  return { fill: SPIRAL_RAMP[base], ring: c.state > 7 };
}

export class Renderer {
  private ctx: CanvasRenderingContext2D;

  constructor(private canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("no 2d context");
    this.ctx = ctx;
  }

  draw(vs: ViewState, cam: Camera): void {
    if (vs.fullRedraw) {
      this.full(vs, cam);
      vs.fullRedraw = false;
      vs.dirty.clear();
      return;
    }
    if (vs.dirty.size === 0) return;
    for (const k of vs.dirty) {
      const [x, y] = k.split(",").map(Number);
      this.cellBackground(vs, cam, x, y);
      this.cell(vs, cam, x, y);
    }
    vs.dirty.clear();
  }

  forceFull(vs: ViewState, cam: Camera): void {
    vs.fullRedraw = true;
    this.draw(vs, cam);
  }

  private full(vs: ViewState, cam: Camera): void {
    const { width, height } = this.canvas;
    this.ctx.fillStyle = COLORS.background;
    this.ctx.fillRect(0, 0, width, height);
    if (!vs.side) return;
    this.ctx.fillStyle = COLORS.grid;
    for (let x = 0; x < vs.side; x++) {
      for (let y = 0; y < vs.side; y++) {
        const [px, py] = cellToScreen(cam, width, height, x, y);
        if (px < -4 || py < -4 || px > width + 4 || py > height + 4) continue;
        this.ctx.fillRect(px - 1, py - 1, 2, 2);
      }
    }
    for (let x = 0; x < vs.side; x++) {
      for (let y = 0; y < vs.side; y++) {
        this.cell(vs, cam, x, y);
      }
    }
  }

  private cellBackground(vs: ViewState, cam: Camera, x: number, y: number): void {
    const { width, height } = this.canvas;
    const [px, py] = cellToScreen(cam, width, height, x, y);
    const r = cam.scale * 0.62;
    this.ctx.fillStyle = COLORS.background;
    this.ctx.fillRect(px - r, py - r, 2 * r, 2 * r);
    this.ctx.fillStyle = COLORS.grid;
    this.ctx.fillRect(px - 1, py - 1, 2, 2);
  }

  private cell(vs: ViewState, cam: Camera, x: number, y: number): void {
    const { width, height } = this.canvas;
    const k = key(x, y);
    const [px, py] = cellToScreen(cam, width, height, x, y);
    if (px < -8 || py < -8 || px > width + 8 || py > height + 8) return;
    if (vs.food.has(k)) {
      this.disc(px, py, cam.scale * 0.55, COLORS.food);
      return;
    }
    const c = vs.cells.get(k);
    if (!c) return;
    const { fill, ring } = cellColor(vs.algo, c);
    this.disc(px, py, cam.scale * 0.4, fill);
    if (ring) {
      this.ctx.strokeStyle = "#ffffff";
      this.ctx.lineWidth = Math.max(1, cam.scale * 0.08);
      this.ctx.beginPath();
      this.ctx.arc(px, py, cam.scale * 0.46, 0, Math.PI * 2);
      this.ctx.stroke();
    }
  }

  private disc(px: number, py: number, r: number, fill: string): void {
    this.ctx.fillStyle = fill;
    this.ctx.beginPath();
    this.ctx.arc(px, py, Math.max(1.5, r), 0, Math.PI * 2);
    this.ctx.fill();
  }
}
