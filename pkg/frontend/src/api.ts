// Thin HTTP client over the session endpoints.

import type { StatePayload, TaskRecord, WorldStatic } from "./types.js";

export interface CreateSessionResponse {
  id: string;
  state: StatePayload;
  world: WorldStatic;
  catalog: { name: string }[];
}

export class ApiError extends Error {
  constructor(message: string, readonly detail?: unknown) {
    super(message);
  }
}

export class Api {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(`${this.baseUrl}${path}`, {
        headers: { "Content-Type": "application/json" },
        ...init,
      });
    } catch (err) {
      throw new ApiError(`service unreachable: ${err}`);
    }
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      const detail = (body as { detail?: unknown }).detail;
      const message =
        typeof detail === "string"
          ? detail
          : (detail as { message?: string })?.message ?? `HTTP ${resp.status}`;
      throw new ApiError(message, detail);
    }
    return body as T;
  }

  createSession(): Promise<CreateSessionResponse> {
    return this.request("/sessions", { method: "POST", body: "{}" });
  }

  sendCommand(sessionId: string, text: string): Promise<{ records: TaskRecord[] }> {
    return this.request(`/sessions/${sessionId}/command`, {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  fetchState(sessionId: string): Promise<{ state: StatePayload; world: WorldStatic; seq: number }> {
    return this.request(`/sessions/${sessionId}/state`);
  }

  websocketUrl(sessionId: string, fromSeq: number): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/sessions/${sessionId}/events?from_seq=${fromSeq}`;
  }
}
