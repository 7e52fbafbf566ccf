/**
 * Typed client for the read-only query service.
 *
 * At most one propagation-style request is in flight; starting a new one
 * aborts the previous request so stale overlays can never win a race.
 */

import type {
  ChainPayload,
  ChainRequest,
  ConsistencyDetailPayload,
  ConsistencyPayload,
  MapDetail,
  MapSummary,
  MetaPayload,
  PropagationPayload,
  PropagateRequest,
} from "./types.js";

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  private inflight: AbortController | null = null;

  constructor(readonly base: string) {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(`${this.base}${path}`);
    return this.unwrap<T>(response);
  }

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    return this.unwrap<T>(response);
  }

  private async unwrap<T>(response: Response): Promise<T> {
    const doc = await response.json();
    if (!response.ok) {
      throw new ServiceError(response.status, doc?.error ?? response.statusText);
    }
    return doc as T;
  }

  meta(): Promise<MetaPayload> {
    return this.get("/meta");
  }

  maps(): Promise<MapSummary[]> {
    return this.get("/maps");
  }

  mapDetail(id: string): Promise<MapDetail> {
    return this.get(`/maps/${encodeURIComponent(id)}`);
  }

  consistency(): Promise<ConsistencyPayload> {
    return this.get("/consistency");
  }

  consistencyDetail(source: string, target: string): Promise<ConsistencyDetailPayload> {
    return this.get(
      `/consistency/${encodeURIComponent(source)}/${encodeURIComponent(target)}`,
    );
  }

  /** Aborts any previous in-flight propagation before issuing this one. */
  propagate(body: PropagateRequest): Promise<PropagationPayload> {
    this.inflight?.abort();
    this.inflight = new AbortController();
    return this.post("/propagate", body, this.inflight.signal);
  }

  chain(body: ChainRequest): Promise<ChainPayload> {
    this.inflight?.abort();
    this.inflight = new AbortController();
    return this.post("/chain", body, this.inflight.signal);
  }
}
