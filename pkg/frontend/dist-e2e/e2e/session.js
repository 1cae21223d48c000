/** Scripted end-to-end session against a live service instance.
 *
 * Drives the same client modules the canvas UI uses (Client, simplify,
 * CanvasState): draws strokes from noisy pointer traces, requests an
 * autocomplete over a region, partially accepts the proposal, and checks
 * that the exported SVG matches the committed state exactly.
 *
 * Usage: node dist-e2e/e2e/session.js [base-url]   (default http://127.0.0.1:8001)
 */
import { Client } from "../src/api.js";
import { rectToPolygon, simplify, toPathData } from "../src/simplify.js";
import { CanvasState } from "../src/state.js";
const BASE = process.argv[2] ?? "http://127.0.0.1:8001";
function check(cond, label) {
    if (!cond) {
        console.error(`E2E FAIL: ${label}`);
        process.exit(1);
    }
    console.log(`e2e ok: ${label}`);
}
/** Noisy pointer trace for a vertical stroke, as a real drag would produce. */
function strokeTrace(x, y0, y1) {
    const pts = [];
    const n = 60;
    for (let i = 0; i <= n; i++) {
        const t = i / n;
        pts.push({ x: x + 0.4 * Math.sin(i * 1.7), y: y0 + t * (y1 - y0) });
    }
    return pts;
}
function pathDataInSvg(svg) {
    return [...svg.matchAll(/<path\b[^>]*\bd="([^"]+)"/g)].map((m) => m[1]);
}
async function main() {
    const client = new Client(BASE);
    const state = new CanvasState();
    // Boot: fresh session.
    const { id: sid } = await client.createSession();
    state.applySession(await client.getSession(sid));
    check(state.sessionId === sid, "session created");
    // Draw 10 strokes through the simplification pipeline the UI uses.
    for (let i = 0; i < 10; i++) {
        const simplified = simplify(strokeTrace(20 + i * 20, 20, 220), 1);
        check(simplified.length >= 2 && simplified.length < 61, `stroke ${i} simplified`);
        state.addCommitted(await client.addStroke(sid, toPathData(simplified)));
    }
    check(state.committed.length === 10, "10 strokes committed");
    // Autocomplete over a region to the right of the strokes.
    const region = rectToPolygon({ x: 240, y: 20 }, { x: 440, y: 220 });
    const cfg = {
        radii: [60.0],
        sampling_distances: [40.0],
        levels: 1,
        iterations_per_level: 2,
    };
    state.pending = true;
    const started = await client.autocomplete(sid, region, { seed: 7, config: cfg });
    const pred = await client.awaitPrediction(started);
    check(pred.status === "ready", `prediction ready (${pred.paths.length} paths)`);
    state.showPrediction(pred);
    check(state.overlay.length > 2, "overlay has more than 2 proposed paths");
    check(state.committed.length === 10, "overlay not merged into committed");
    // Partially accept: select 2 overlay paths, resolve, re-fetch, re-render.
    state.toggleOverlaySelection(state.overlay[0].id);
    state.toggleOverlaySelection(state.overlay[1].id);
    const accepted = state.selectedOverlayIds();
    check(accepted.length === 2, "2 overlay paths selected");
    const resolvedIds = await client.resolve(pred.id, "accept_paths", accepted);
    check(JSON.stringify([...resolvedIds].sort()) === JSON.stringify([...accepted].sort()), "prediction resolved with the selected paths");
    state.applyResolution(await client.getSession(sid));
    check(state.committed.length === 12, "committed = 10 strokes + 2 accepted");
    check(state.overlay.length === 0 && state.predictionId === null, "overlay cleared");
    // Post-resolve client state must equal a fresh session fetch.
    const fresh = new CanvasState();
    fresh.applySession(await client.getSession(sid));
    check(JSON.stringify(state.committed) === JSON.stringify(fresh.committed), "state after resolve equals fresh session render");
    // Export and verify the SVG matches the committed set exactly: every
    // stroke is a single subpath and prediction paths round-trip verbatim,
    // so the path count and the accepted geometry pin the committed set.
    const svg = await client.exportSvg(sid);
    check(svg.startsWith("<?xml"), "export is an SVG document");
    const ds = pathDataInSvg(svg);
    check(ds.length === state.committed.length, "export has one path per committed entry");
    const acceptedPaths = state.committed.filter((p) => accepted.includes(p.id));
    for (const p of acceptedPaths)
        check(ds.includes(p.d), `accepted path ${p.id} exported`);
    const rejected = pred.paths.filter((p) => !accepted.includes(p.id));
    for (const p of rejected)
        check(!ds.includes(p.d), `rejected path ${p.id} not exported`);
    await client.deleteSession(sid);
    console.log("E2E PASS");
}
main().catch((err) => {
    console.error("E2E FAIL:", err);
    process.exit(1);
});
