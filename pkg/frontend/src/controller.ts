// Glue between the API client, the view model and the DOM. The client
// holds no authoritative state: every render derives from the latest
// server responses, and a failed submission re-renders the unchanged
// view with the server's error inline.

import { ApiClient, NetworkFailure } from "./api.js";
import { renderBoard, renderNetworkRetry, renderNotFound } from "./board.js";
import { buildViewModel, type SessionViewModel } from "./viewmodel.js";
import type { ApiError, GatesPayload, SessionPayload } from "./types.js";

export class SessionBoard {
  viewModel: SessionViewModel | null = null;
  lastError: ApiError | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private sessionId: string,
  ) {}

  async load(sessionId: string = this.sessionId): Promise<void> {
    this.sessionId = sessionId;
    let session: SessionPayload;
    let gates: GatesPayload;
    try {
      const sessionEnvelope = await this.api.getSession(sessionId);
      if (!sessionEnvelope.ok) {
        renderNotFound(this.root, sessionId);
        this.viewModel = null;
        return;
      }
      session = sessionEnvelope.data;
      const gatesEnvelope = await this.api.gates(sessionId);
      if (!gatesEnvelope.ok) {
        renderNotFound(this.root, sessionId);
        this.viewModel = null;
        return;
      }
      gates = gatesEnvelope.data;
    } catch (failure) {
      if (failure instanceof NetworkFailure) {
        renderNetworkRetry(this.root, () => void this.load(sessionId));
        return;
      }
      throw failure;
    }
    this.lastError = null;
    this.viewModel = buildViewModel(session, gates);
    this.render();
  }

  /** Submit one step; returns true when the server accepted it. */
  async submit(stepName: string, body: unknown): Promise<boolean> {
    const envelope = await this.api.step(this.sessionId, stepName, body);
    if (!envelope.ok) {
      // Server rejected: keep the current (still authoritative) view and
      // surface the error inline at its field path.
      this.lastError = envelope.error;
      this.render();
      return false;
    }
    await this.load(this.sessionId);
    return true;
  }

  private render(): void {
    if (!this.viewModel) return;
    renderBoard(
      this.root,
      this.viewModel,
      (step, body) => void this.submit(step, body),
      this.lastError,
    );
  }
}
