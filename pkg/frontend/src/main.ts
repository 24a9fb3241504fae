/**
 * App wiring: connect form, canvas with pan/zoom, food tools, parameter
 * sliders, and the metric sparklines.
 */

import { Camera, fitCamera, pan, screenToCell, zoom } from "./hex.js";
import { Connection } from "./net.js";
import { Renderer } from "./render.js";
import { SERIES, drawSparkline } from "./sparkline.js";
import {
  Tool, clickCommand, describeCell, dragCommand, paramCommand,
} from "./gestures.js";
import { applyServer, initialState, isFood, trackPending } from "./state.js";
import { Command } from "./protocol.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("grid");
const renderer = new Renderer(canvas);
const vs = initialState();
let cam: Camera = { ox: 0, oy: 0, scale: 12 };
let tool: Tool = "place";
let conn: Connection | null = null;
let dragFrom: [number, number] | null = null;
let framed = false;

function send(cmd: Command | null): void {
  if (!cmd || !conn) return;
  const id = conn.send(cmd);
  if (id !== null) trackPending(vs, id, cmd);
}

function connect(): void {
  conn?.close();
  framed = false;
  const url = $<HTMLInputElement>("server-url").value;
  conn = new Connection(
    url,
    (msg) => {
      applyServer(vs, msg);
      if ((msg.type === "snapshot" || msg.type === "delta") && !framed && vs.side) {
        cam = fitCamera(vs.side, canvas.width, canvas.height);
        framed = true;
        vs.fullRedraw = true;
      }
      refresh();
    },
    (ok) => {
      vs.connected = ok;
      $<HTMLSpanElement>("status").textContent = ok ? "connected" : "disconnected";
    },
  );
  conn.open();
}

function refresh(): void {
  renderer.draw(vs, cam);
  $<HTMLSpanElement>("step").textContent =
    `step ${vs.step} | ${vs.running ? "running" : "paused"} @ ${vs.speed}/s`;
  const m = vs.metricsHistory[vs.metricsHistory.length - 1];
  if (m) {
    $<HTMLSpanElement>("metrics-line").textContent =
      `phi=${m.phi} clusters=${m.cluster_count} residual=${m.n_residual}` +
      (vs.algo === "spiral" ? ` stage=${m.stage} inc=${m.inconsistency}` : "") +
      (m.alpha !== null ? ` alpha=${m.alpha.toFixed(2)}` : "");
  }
  SERIES.forEach((s, i) => {
    drawSparkline(
      $<HTMLCanvasElement>(`spark-${i}`), vs.metricsHistory, s,
    );
  });
  const toasts = $<HTMLDivElement>("toasts");
  toasts.innerHTML = "";
  const now = Date.now();
  vs.toasts = vs.toasts.filter((t) => now - t.at < 4000);
  for (const t of vs.toasts) {
    const div = document.createElement("div");
    div.className = "toast";
    div.textContent = t.text;
    toasts.appendChild(div);
  }
}

// ---- canvas interaction ----------------------------------------------------

let panning = false;
let lastPx = 0;
let lastPy = 0;

canvas.addEventListener("mousedown", (ev) => {
  const cell = screenToCell(cam, canvas.width, canvas.height, ev.offsetX, ev.offsetY, vs.side || 1);
  if (ev.button === 1 || ev.shiftKey || tool === "inspect") {
    panning = true;
    lastPx = ev.offsetX;
    lastPy = ev.offsetY;
    return;
  }
  if (tool === "move" && isFood(vs, cell[0], cell[1])) {
    dragFrom = cell;
    return;
  }
  send(clickCommand(tool, cell, vs));
});

canvas.addEventListener("mousemove", (ev) => {
  if (panning) {
    cam = pan(cam, ev.offsetX - lastPx, ev.offsetY - lastPy);
    lastPx = ev.offsetX;
    lastPy = ev.offsetY;
    renderer.forceFull(vs, cam);
    return;
  }
  if (!vs.side) return;
  const cell = screenToCell(cam, canvas.width, canvas.height, ev.offsetX, ev.offsetY, vs.side);
  $<HTMLSpanElement>("hover").textContent = describeCell(vs, cell);
});

canvas.addEventListener("mouseup", (ev) => {
  if (panning) {
    panning = false;
    return;
  }
  if (dragFrom) {
    const cell = screenToCell(cam, canvas.width, canvas.height, ev.offsetX, ev.offsetY, vs.side || 1);
    send(dragCommand("move", dragFrom, cell, vs));
    dragFrom = null;
  }
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  cam = zoom(cam, ev.deltaY < 0 ? 1.15 : 1 / 1.15);
  renderer.forceFull(vs, cam);
});

// ---- toolbar ----------------------------------------------------------------

for (const t of ["place", "move", "remove", "inspect"] as Tool[]) {
  $<HTMLButtonElement>(`tool-${t}`).addEventListener("click", () => {
    tool = t;
    document.querySelectorAll(".tool").forEach((b) => b.classList.remove("active"));
    $<HTMLButtonElement>(`tool-${t}`).classList.add("active");
  });
}

$<HTMLButtonElement>("btn-pause").addEventListener("click", () => send({ type: "pause" }));
$<HTMLButtonElement>("btn-resume").addEventListener("click", () => send({ type: "resume" }));
$<HTMLButtonElement>("btn-step").addEventListener("click", () =>
  send({ type: "step", k: Number($<HTMLInputElement>("step-k").value) || 1 }));
$<HTMLInputElement>("speed").addEventListener("change", (ev) =>
  send({ type: "set_speed", sps: Number((ev.target as HTMLInputElement).value) }));

for (const name of ["lambda", "p", "rho"]) {
  const slider = $<HTMLInputElement>(`param-${name}`);
  slider.addEventListener("change", () => {
    send(paramCommand(name, Number(slider.value)));
    $<HTMLSpanElement>(`param-${name}-val`).textContent = slider.value;
  });
}

$<HTMLButtonElement>("btn-connect").addEventListener("click", connect);
$<HTMLButtonElement>("btn-fit").addEventListener("click", () => {
  if (vs.side) {
    cam = fitCamera(vs.side, canvas.width, canvas.height);
    renderer.forceFull(vs, cam);
  }
});

setInterval(refresh, 250);
connect();
