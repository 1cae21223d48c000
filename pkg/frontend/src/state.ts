/** Client-side canvas state: committed paths, a pending overlay, and the active tool.
 *
 * Overlay paths are never merged into the committed set locally; resolution
 * happens on the server and the client re-renders from the server response,
 * so the state after accept/reject always equals a fresh session fetch.
 */

import type { PathRecord, Prediction, SessionState } from "./api.js";

export type Tool = "draw" | "select-domain" | "clone-source" | "clone-target" | "resolve";

export interface OverlayPath extends PathRecord {
  selected: boolean;
}

export class CanvasState {
  sessionId: string | null = null;
  committed: PathRecord[] = [];
  tool: Tool = "draw";
  /** Prediction whose paths are shown as the overlay, if any. */
  predictionId: string | null = null;
  overlay: OverlayPath[] = [];
  pending = false;
  /** Source polygon captured by the clone-source tool, awaiting a target. */
  cloneSource: number[][] | null = null;

  applySession(session: SessionState): void {
    this.sessionId = session.id;
    this.committed = session.committed.map((p) => ({ ...p }));
  }

  addCommitted(path: PathRecord): void {
    this.committed.push({ ...path });
  }

  setTool(tool: Tool): void {
    if (tool !== "clone-target") this.cloneSource = null;
    this.tool = tool;
  }

  /** ESC during a clone gesture: forget the captured source region. */
  cancelCloneGesture(): void {
    this.cloneSource = null;
    if (this.tool === "clone-target") this.tool = "clone-source";
  }

  showPrediction(pred: Prediction): void {
    this.predictionId = pred.id;
    this.pending = pred.status === "pending";
    this.overlay =
      pred.status === "ready" ? pred.paths.map((p) => ({ ...p, selected: false })) : [];
  }

  toggleOverlaySelection(pathId: string): void {
    const p = this.overlay.find((o) => o.id === pathId);
    if (p) p.selected = !p.selected;
  }

  selectedOverlayIds(): string[] {
    return this.overlay.filter((o) => o.selected).map((o) => o.id);
  }

  clearOverlay(): void {
    this.predictionId = null;
    this.overlay = [];
    this.pending = false;
  }

  /** After a resolve round-trip, adopt the server's committed set verbatim. */
  applyResolution(session: SessionState): void {
    this.applySession(session);
    this.clearOverlay();
  }
}
