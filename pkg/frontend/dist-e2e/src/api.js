/** Typed HTTP client for the curvesynth session service. */
export class ApiError extends Error {
    status;
    detail;
    constructor(status, detail) {
        super(`HTTP ${status}: ${detail}`);
        this.status = status;
        this.detail = detail;
    }
}
async function readError(res) {
    let detail = res.statusText;
    try {
        const body = (await res.json());
        if (body && body.detail !== undefined)
            detail = String(body.detail);
    }
    catch {
        /* non-JSON error body */
    }
    throw new ApiError(res.status, detail);
}
export class Client {
    baseUrl;
    constructor(baseUrl) {
        this.baseUrl = baseUrl;
        this.baseUrl = baseUrl.replace(/\/$/, "");
    }
    async json(path, init) {
        const res = await fetch(this.baseUrl + path, init);
        if (!res.ok)
            await readError(res);
        return (await res.json());
    }
    createSession(seed) {
        return this.json("/sessions", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: seed === undefined ? "" : JSON.stringify({ seed }),
        });
    }
    getSession(sid) {
        return this.json(`/sessions/${sid}`);
    }
    async deleteSession(sid) {
        const res = await fetch(`${this.baseUrl}/sessions/${sid}`, { method: "DELETE" });
        if (!res.ok && res.status !== 204)
            await readError(res);
    }
    /** POST path data; the service returns the new stroke's id. */
    async addStroke(sid, pathData) {
        const { id } = await this.json(`/sessions/${sid}/strokes`, {
            method: "POST",
            headers: { "Content-Type": "text/plain" },
            body: pathData,
        });
        return { id, d: pathData };
    }
    async startPrediction(path, body) {
        const res = await fetch(this.baseUrl + path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        if (!res.ok)
            await readError(res);
        if (res.status === 202) {
            const pending = (await res.json());
            return { pendingId: pending.prediction_id };
        }
        return { prediction: (await res.json()) };
    }
    autocomplete(sid, domain, opts = {}) {
        return this.startPrediction(`/sessions/${sid}/autocomplete`, { domain, ...opts });
    }
    clone(sid, source, target, opts = {}) {
        return this.startPrediction(`/sessions/${sid}/clone`, { source, target, ...opts });
    }
    resynthesize(sid, predictionId, region, opts = {}) {
        return this.startPrediction(`/sessions/${sid}/resynthesize`, {
            prediction: predictionId,
            region,
            ...opts,
        });
    }
    getPrediction(pid) {
        return this.json(`/predictions/${pid}`);
    }
    /** Resolve a started request to a finished prediction, polling if pending. */
    async awaitPrediction(started, intervalMs = 250, timeoutMs = 300_000) {
        if (started.prediction)
            return started.prediction;
        return this.pollUntilReady(started.pendingId, intervalMs, timeoutMs);
    }
    /** Poll a pending prediction until it leaves the "pending" state. */
    async pollUntilReady(pid, intervalMs = 250, timeoutMs = 300_000) {
        const deadline = Date.now() + timeoutMs;
        for (;;) {
            const pred = await this.getPrediction(pid);
            if (pred.status !== "pending")
                return pred;
            if (Date.now() > deadline)
                throw new Error(`prediction ${pid} timed out`);
            await new Promise((r) => setTimeout(r, intervalMs));
        }
    }
    async resolve(pid, action, pathIds) {
        const body = { action };
        if (pathIds !== undefined)
            body.paths = pathIds;
        const res = await this.json(`/predictions/${pid}/resolve`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        return res.accepted;
    }
    async exportSvg(sid) {
        const res = await fetch(`${this.baseUrl}/sessions/${sid}/export`);
        if (!res.ok)
            await readError(res);
        return res.text();
    }
}
