/** Typed HTTP client for the curvesynth session service. */

export interface PathRecord {
  id: string;
  d: string;
}

export type PredictionStatus = "pending" | "ready" | "failed" | "resolved";

export interface Prediction {
  id: string;
  status: PredictionStatus;
  domain: number[][];
  seed: number;
  config: Record<string, unknown>;
  paths: PathRecord[];
  error?: string;
  accepted?: string[];
}

export interface SessionCreated {
  id: string;
  seed: number;
}

export interface SessionState {
  id: string;
  seed: number;
  committed: PathRecord[];
  predictions: Record<string, Prediction>;
}

/** Either an immediately-finished prediction or a 202 pending handle. */
export interface StartedPrediction {
  prediction?: Prediction;
  pendingId?: string;
}

export interface SynthesisOptions {
  seed?: number;
  config?: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function readError(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (body && body.detail !== undefined) detail = String(body.detail);
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(res.status, detail);
}

export class Client {
  constructor(private baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) await readError(res);
    return (await res.json()) as T;
  }

  createSession(seed?: number): Promise<SessionCreated> {
    return this.json<SessionCreated>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: seed === undefined ? "" : JSON.stringify({ seed }),
    });
  }

  getSession(sid: string): Promise<SessionState> {
    return this.json<SessionState>(`/sessions/${sid}`);
  }

  async deleteSession(sid: string): Promise<void> {
    const res = await fetch(`${this.baseUrl}/sessions/${sid}`, { method: "DELETE" });
    if (!res.ok && res.status !== 204) await readError(res);
  }

  /** POST path data; the service returns the new stroke's id. */
  async addStroke(sid: string, pathData: string): Promise<PathRecord> {
    const { id } = await this.json<{ id: string }>(`/sessions/${sid}/strokes`, {
      method: "POST",
      headers: { "Content-Type": "text/plain" },
      body: pathData,
    });
    return { id, d: pathData };
  }

  private async startPrediction(path: string, body: unknown): Promise<StartedPrediction> {
    const res = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) await readError(res);
    if (res.status === 202) {
      const pending = (await res.json()) as { prediction_id: string };
      return { pendingId: pending.prediction_id };
    }
    return { prediction: (await res.json()) as Prediction };
  }

  autocomplete(sid: string, domain: number[][], opts: SynthesisOptions = {}): Promise<StartedPrediction> {
    return this.startPrediction(`/sessions/${sid}/autocomplete`, { domain, ...opts });
  }

  clone(
    sid: string,
    source: number[][],
    target: number[][],
    opts: SynthesisOptions = {},
  ): Promise<StartedPrediction> {
    return this.startPrediction(`/sessions/${sid}/clone`, { source, target, ...opts });
  }

  resynthesize(
    sid: string,
    predictionId: string,
    region: number[][],
    opts: SynthesisOptions = {},
  ): Promise<StartedPrediction> {
    return this.startPrediction(`/sessions/${sid}/resynthesize`, {
      prediction: predictionId,
      region,
      ...opts,
    });
  }

  getPrediction(pid: string): Promise<Prediction> {
    return this.json<Prediction>(`/predictions/${pid}`);
  }

  /** Resolve a started request to a finished prediction, polling if pending. */
  async awaitPrediction(
    started: StartedPrediction,
    intervalMs = 250,
    timeoutMs = 300_000,
  ): Promise<Prediction> {
    if (started.prediction) return started.prediction;
    return this.pollUntilReady(started.pendingId!, intervalMs, timeoutMs);
  }

  /** Poll a pending prediction until it leaves the "pending" state. */
  async pollUntilReady(pid: string, intervalMs = 250, timeoutMs = 300_000): Promise<Prediction> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const pred = await this.getPrediction(pid);
      if (pred.status !== "pending") return pred;
      if (Date.now() > deadline) throw new Error(`prediction ${pid} timed out`);
      await new Promise((r) => setTimeout(r, intervalMs));
    }
  }

  async resolve(
    pid: string,
    action: "accept_all" | "reject_all" | "accept_paths",
    pathIds?: string[],
  ): Promise<string[]> {
    const body: Record<string, unknown> = { action };
    if (pathIds !== undefined) body.paths = pathIds;
    const res = await this.json<{ accepted: string[] }>(`/predictions/${pid}/resolve`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return res.accepted;
  }

  async exportSvg(sid: string): Promise<string> {
    const res = await fetch(`${this.baseUrl}/sessions/${sid}/export`);
    if (!res.ok) await readError(res);
    return res.text();
  }
}
