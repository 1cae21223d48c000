/** Browser authoring canvas for the curvesynth session service.
 *
 * Tools: draw strokes, select a domain rectangle for autocomplete, pick
 * clone source and target rectangles, and resolve prediction overlays.
 * Keyboard: A accepts the overlay (selected paths if any, otherwise all),
 * R rejects it, ESC cancels an in-progress clone gesture.
 */

import { ApiError, Client } from "./api.js";
import type { StartedPrediction } from "./api.js";
import { rectToPolygon, simplify, toPathData } from "./simplify.js";
import type { Pt } from "./simplify.js";
import { CanvasState } from "./state.js";
import type { Tool } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const OVERLAY_COLOR = "#d81b60";
const SELECTED_COLOR = "#1e88e5";
const COMMITTED_COLOR = "#222";

const client = new Client(
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000",
);
const state = new CanvasState();

const canvas = document.getElementById("canvas") as unknown as SVGSVGElement;
const committedLayer = ensureLayer("committed");
const overlayLayer = ensureLayer("overlay");
const gestureLayer = ensureLayer("gesture");
const statusEl = document.getElementById("status")!;
const toastEl = document.getElementById("toast")!;

function ensureLayer(id: string): SVGGElement {
  const g = document.createElementNS(SVG_NS, "g");
  g.id = id;
  canvas.appendChild(g);
  return g;
}

function toast(message: string): void {
  toastEl.textContent = message;
  toastEl.classList.add("visible");
  setTimeout(() => toastEl.classList.remove("visible"), 4000);
}

function setStatus(message: string): void {
  statusEl.textContent = message;
}

function reportError(err: unknown): void {
  if (err instanceof ApiError) toast(err.message);
  else toast(String(err));
}

function render(): void {
  committedLayer.replaceChildren(
    ...state.committed.map((p) => pathElement(p.d, COMMITTED_COLOR, p.id)),
  );
  overlayLayer.replaceChildren(
    ...state.overlay.map((p) => {
      const el = pathElement(p.d, p.selected ? SELECTED_COLOR : OVERLAY_COLOR, p.id);
      el.classList.add("overlay-path");
      el.addEventListener("pointerdown", (ev) => {
        if (state.tool === "resolve") {
          ev.stopPropagation();
          state.toggleOverlaySelection(p.id);
          render();
        }
      });
      return el;
    }),
  );
  setStatus(
    state.pending
      ? "synthesizing…"
      : state.overlay.length > 0
        ? `${state.overlay.length} proposed paths — A accepts, R rejects`
        : `${state.committed.length} committed paths`,
  );
}

function pathElement(d: string, stroke: string, id: string): SVGPathElement {
  const el = document.createElementNS(SVG_NS, "path");
  el.setAttribute("d", d);
  el.setAttribute("fill", "none");
  el.setAttribute("stroke", stroke);
  el.setAttribute("stroke-width", "2");
  el.dataset.pathId = id;
  return el;
}

function canvasPoint(ev: PointerEvent): Pt {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

// --- pointer gestures -------------------------------------------------------

let trace: Pt[] = [];
let dragStart: Pt | null = null;
let previewEl: SVGElement | null = null;

canvas.addEventListener("pointerdown", (ev) => {
  const p = canvasPoint(ev);
  canvas.setPointerCapture(ev.pointerId);
  if (state.tool === "draw") {
    trace = [p];
    previewEl = pathElement(`M ${p.x} ${p.y}`, "#888", "preview");
    gestureLayer.appendChild(previewEl);
  } else if (state.tool !== "resolve") {
    dragStart = p;
    previewEl = document.createElementNS(SVG_NS, "rect");
    previewEl.setAttribute("fill", "rgba(255, 213, 79, 0.3)");
    previewEl.setAttribute("stroke", "#f9a825");
    gestureLayer.appendChild(previewEl);
  }
});

canvas.addEventListener("pointermove", (ev) => {
  const p = canvasPoint(ev);
  if (state.tool === "draw" && trace.length > 0) {
    trace.push(p);
    previewEl?.setAttribute("d", toPathData(trace));
  } else if (dragStart && previewEl) {
    previewEl.setAttribute("x", String(Math.min(dragStart.x, p.x)));
    previewEl.setAttribute("y", String(Math.min(dragStart.y, p.y)));
    previewEl.setAttribute("width", String(Math.abs(p.x - dragStart.x)));
    previewEl.setAttribute("height", String(Math.abs(p.y - dragStart.y)));
  }
});

canvas.addEventListener("pointerup", (ev) => {
  const p = canvasPoint(ev);
  if (state.tool === "draw" && trace.length > 1) {
    void commitStroke(simplify(trace, 1));
  } else if (dragStart) {
    const polygon = rectToPolygon(dragStart, p);
    if (Math.abs(p.x - dragStart.x) > 2 && Math.abs(p.y - dragStart.y) > 2) {
      void handleRegion(polygon);
    }
  }
  trace = [];
  dragStart = null;
  previewEl?.remove();
  previewEl = null;
});

async function commitStroke(points: Pt[]): Promise<void> {
  if (!state.sessionId) return;
  try {
    const path = await client.addStroke(state.sessionId, toPathData(points));
    state.addCommitted(path);
    render();
  } catch (err) {
    reportError(err);
  }
}

async function handleRegion(polygon: number[][]): Promise<void> {
  if (!state.sessionId) return;
  if (state.tool === "select-domain") {
    await runPrediction(() => client.autocomplete(state.sessionId!, polygon));
  } else if (state.tool === "clone-source") {
    state.cloneSource = polygon;
    state.tool = "clone-target";
    setStatus("clone: drag the target region (ESC cancels)");
  } else if (state.tool === "clone-target" && state.cloneSource) {
    const source = state.cloneSource;
    state.cancelCloneGesture();
    await runPrediction(() => client.clone(state.sessionId!, source, polygon));
  }
}

async function runPrediction(start: () => Promise<StartedPrediction>): Promise<void> {
  try {
    state.pending = true;
    render();
    const prediction = await client.awaitPrediction(await start());
    if (prediction.status === "failed") {
      toast(`synthesis failed: ${prediction.error ?? "unknown error"}`);
      state.clearOverlay();
    } else {
      state.showPrediction(prediction);
      state.setTool("resolve");
      syncToolButtons();
    }
  } catch (err) {
    state.clearOverlay();
    reportError(err);
  }
  render();
}

// --- overlay resolution -----------------------------------------------------

async function resolveOverlay(accept: boolean): Promise<void> {
  if (!state.predictionId || !state.sessionId) return;
  const selected = state.selectedOverlayIds();
  const action = !accept ? "reject_all" : selected.length > 0 ? "accept_paths" : "accept_all";
  try {
    await client.resolve(state.predictionId, action, action === "accept_paths" ? selected : undefined);
    const session = await client.getSession(state.sessionId);
    state.applyResolution(session);
    render();
  } catch (err) {
    reportError(err);
  }
}

document.addEventListener("keydown", (ev) => {
  if (ev.key === "a" || ev.key === "A") void resolveOverlay(true);
  else if (ev.key === "r" || ev.key === "R") void resolveOverlay(false);
  else if (ev.key === "Escape") {
    state.cancelCloneGesture();
    syncToolButtons();
    setStatus("clone gesture cancelled");
  }
});

// --- toolbar ----------------------------------------------------------------

function syncToolButtons(): void {
  document.querySelectorAll<HTMLButtonElement>("button[data-tool]").forEach((btn) => {
    btn.classList.toggle("active", btn.dataset.tool === state.tool);
  });
}

document.querySelectorAll<HTMLButtonElement>("button[data-tool]").forEach((btn) => {
  btn.addEventListener("click", () => {
    state.setTool(btn.dataset.tool as Tool);
    syncToolButtons();
  });
});

document.getElementById("export")!.addEventListener("click", () => {
  if (!state.sessionId) return;
  void client
    .exportSvg(state.sessionId)
    .then((svg) => {
      const url = URL.createObjectURL(new Blob([svg], { type: "image/svg+xml" }));
      const a = document.createElement("a");
      a.href = url;
      a.download = "drawing.svg";
      a.click();
      URL.revokeObjectURL(url);
    })
    .catch(reportError);
});

// --- boot -------------------------------------------------------------------

async function boot(): Promise<void> {
  try {
    const { id } = await client.createSession();
    state.applySession(await client.getSession(id));
    syncToolButtons();
    render();
  } catch (err) {
    reportError(err);
    setStatus("could not reach the synthesis service");
  }
}

void boot();
