/** Minimal sparkline strips for the live metrics (phi, alpha, stage). */

import { Metrics } from "./protocol.js";

export interface Series {
  label: string;
  pick: (m: Metrics) => number | null;
  color: string;
}

export const SERIES: Series[] = [
  { label: "phi", pick: (m) => m.phi, color: "#63b3ed" },
  { label: "alpha", pick: (m) => m.alpha, color: "#f6ad55" },
  { label: "stage", pick: (m) => m.stage, color: "#68d391" },
];

export function drawSparkline(
  canvas: HTMLCanvasElement, history: Metrics[], series: Series,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.fillStyle = "#161b21";
  ctx.fillRect(0, 0, width, height);
  const pts: [number, number][] = [];
  let lo = Infinity;
  let hi = -Infinity;
  history.forEach((m, i) => {
    const v = series.pick(m);
    if (v === null || Number.isNaN(v)) return;
    pts.push([i, v]);
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  });
  ctx.fillStyle = "#8a97a5";
  ctx.font = "10px sans-serif";
  if (pts.length < 2) {
    ctx.fillText(series.label, 4, 12);
    return;
  }
  if (hi === lo) hi = lo + 1;
  ctx.strokeStyle = series.color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  const n = history.length;
  pts.forEach(([i, v], idx) => {
    const px = (i / Math.max(1, n - 1)) * (width - 8) + 4;
    const py = height - 14 - ((v - lo) / (hi - lo)) * (height - 22);
    if (idx === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
  const last = pts[pts.length - 1][1];
  ctx.fillText(`${series.label} ${fmt(last)}  [${fmt(lo)}..${fmt(hi)}]`, 4, 12);
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(2);
}
