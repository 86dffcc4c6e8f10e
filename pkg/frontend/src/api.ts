// Thin client over the session HTTP API. The board talks to the server
// through this module only; an onEnvelope hook lets integration tests
// intercept every raw server response for fidelity comparisons.

import type {
  Envelope,
  GatesPayload,
  HistoryDiffPayload,
  SessionPayload,
} from "./types.js";

export interface ApiHooks {
  onEnvelope?: (method: string, path: string, envelope: Envelope<unknown>) => void;
}

export class NetworkFailure extends Error {
  constructor(readonly path: string, cause: unknown) {
    super(`network failure on ${path}: ${String(cause)}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly hooks: ApiHooks = {},
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Envelope<T>> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new NetworkFailure(path, cause);
    }
    const envelope = (await response.json()) as Envelope<T>;
    this.hooks.onEnvelope?.(method, path, envelope as Envelope<unknown>);
    return envelope;
  }

  createSession(body: Record<string, unknown>): Promise<Envelope<SessionPayload>> {
    return this.request("POST", "/sessions", body);
  }

  getSession(sessionId: string): Promise<Envelope<SessionPayload>> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  step(
    sessionId: string,
    stepName: string,
    body: unknown,
  ): Promise<Envelope<SessionPayload>> {
    return this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/steps/${encodeURIComponent(stepName)}`,
      body,
    );
  }

  gates(sessionId: string): Promise<Envelope<GatesPayload>> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/gates`);
  }

  historyDiff(themeKey: string): Promise<Envelope<HistoryDiffPayload>> {
    return this.request(
      "GET",
      `/themes/${encodeURIComponent(themeKey)}/history/diff`,
    );
  }
}
