// Console state machine. The view is always a pure function of the last
// server payload; submissions are serialized (one in-flight request) and
// a network failure parks the console in a retryable error state without
// losing the session.

import { ApiError, Client, MalformedPayloadError } from "./api.js";
import { Meta, SessionView } from "./types.js";

export type Phase = "connecting" | "live" | "finished" | "error";

export interface ConsoleState {
  phase: Phase;
  meta: Meta | null;
  view: SessionView | null;
  trajectory: (number | null)[]; // server-reported log10 Z per stage
  inFlight: boolean;
  error: { message: string; rawBody: string | null; retryable: boolean } | null;
  pendingOutcome: string | null; // outcome to resend on retry
}

export type Listener = (state: ConsoleState) => void;

export class ConsoleStore {
  private state: ConsoleState = {
    phase: "connecting",
    meta: null,
    view: null,
    trajectory: [],
    inFlight: false,
    error: null,
    pendingOutcome: null,
  };
  private listeners: Listener[] = [];

  constructor(private readonly client: Client) {}

  get(): ConsoleState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private set(patch: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  private acceptView(view: SessionView): void {
    const trajectory = this.state.trajectory.slice(0, view.stage);
    trajectory[view.stage] = view.log10_z;
    this.set({
      phase: view.stopped ? "finished" : "live",
      view,
      trajectory,
      inFlight: false,
      error: null,
      pendingOutcome: null,
    });
  }

  async start(): Promise<void> {
    this.set({ phase: "connecting", inFlight: true, error: null });
    try {
      const meta = await this.client.meta();
      const view = await this.client.createSession();
      this.set({ meta });
      this.acceptView(view);
    } catch (err) {
      this.fail(err, true);
    }
  }

  /** Submit an outcome; ignored while another request is in flight. */
  async submit(outcome: string): Promise<void> {
    const { view, inFlight, phase } = this.state;
    if (inFlight || phase !== "live" || !view) return;
    this.set({ inFlight: true, pendingOutcome: outcome });
    try {
      this.acceptView(await this.client.observe(view.id, outcome));
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // the session finished server-side; re-sync instead of guessing
        try {
          this.acceptView(await this.client.getSession(view.id));
          return;
        } catch (refreshErr) {
          this.fail(refreshErr, true);
          return;
        }
      }
      this.fail(err, !(err instanceof MalformedPayloadError));
    }
  }

  async retry(): Promise<void> {
    const { pendingOutcome, view } = this.state;
    if (view === null) {
      await this.start();
      return;
    }
    this.set({
      phase: view.stopped ? "finished" : "live",
      error: null,
      inFlight: false,
    });
    if (pendingOutcome !== null) await this.submit(pendingOutcome);
  }

  private fail(err: unknown, retryable: boolean): void {
    const rawBody = err instanceof MalformedPayloadError ? err.rawBody
      : err instanceof ApiError ? err.rawBody : null;
    this.set({
      phase: "error",
      inFlight: false,
      error: {
        message: err instanceof Error ? err.message : String(err),
        rawBody,
        retryable,
      },
    });
  }
}
