/** Client-side canvas state: committed paths, a pending overlay, and the active tool.
 *
 * Overlay paths are never merged into the committed set locally; resolution
 * happens on the server and the client re-renders from the server response,
 * so the state after accept/reject always equals a fresh session fetch.
 */
export class CanvasState {
    sessionId = null;
    committed = [];
    tool = "draw";
    /** Prediction whose paths are shown as the overlay, if any. */
    predictionId = null;
    overlay = [];
    pending = false;
    /** Source polygon captured by the clone-source tool, awaiting a target. */
    cloneSource = null;
    applySession(session) {
        this.sessionId = session.id;
        this.committed = session.committed.map((p) => ({ ...p }));
    }
    addCommitted(path) {
        this.committed.push({ ...path });
    }
    setTool(tool) {
        if (tool !== "clone-target")
            this.cloneSource = null;
        this.tool = tool;
    }
    /** ESC during a clone gesture: forget the captured source region. */
    cancelCloneGesture() {
        this.cloneSource = null;
        if (this.tool === "clone-target")
            this.tool = "clone-source";
    }
    showPrediction(pred) {
        this.predictionId = pred.id;
        this.pending = pred.status === "pending";
        this.overlay =
            pred.status === "ready" ? pred.paths.map((p) => ({ ...p, selected: false })) : [];
    }
    toggleOverlaySelection(pathId) {
        const p = this.overlay.find((o) => o.id === pathId);
        if (p)
            p.selected = !p.selected;
    }
    selectedOverlayIds() {
        return this.overlay.filter((o) => o.selected).map((o) => o.id);
    }
    clearOverlay() {
        this.predictionId = null;
        this.overlay = [];
        this.pending = false;
    }
    /** After a resolve round-trip, adopt the server's committed set verbatim. */
    applyResolution(session) {
        this.applySession(session);
        this.clearOverlay();
    }
}
