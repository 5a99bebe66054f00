// Pure projection of console state onto a flat UI model. Every displayed
// value is lifted verbatim from a service field, which keeps this layer
// trivially contract-testable: no solver math happens here.

import { ConsoleState } from "./state.js";
import { HistoryEntry } from "./types.js";

export interface ChartModel {
  points: { stage: number; log10Z: number | null }[];
  interval: { lower: number; upper: number } | null; // shaded iff region is INTERVAL
}

export interface UiModel {
  phase: "connecting" | "live" | "finished" | "error";
  stage: number | null;
  zExact: string | null;
  log10Z: number | null;
  recommendedControl: string | null;
  margin: number | null;
  stopped: boolean;
  decision: string | null;
  decisionLabel: string | null;
  forcedStop: boolean;
  history: HistoryEntry[];
  outcomes: string[];
  inputsEnabled: boolean;
  pathologyBanner: string | null;
  error: { message: string; rawBody: string | null; retryable: boolean } | null;
  chart: ChartModel;
}

const DECISION_LABELS: Record<string, string> = {
  REJECT_H0: "Reject H0",
  ACCEPT_H0: "Accept H0",
};

export function buildUiModel(state: ConsoleState): UiModel {
  const { meta, view } = state;
  const region = meta?.region ?? null;
  const interval =
    region && region.kind === "INTERVAL" && region.lower !== null && region.upper !== null
      ? { lower: region.lower, upper: region.upper }
      : null;
  return {
    phase: state.phase,
    stage: view ? view.stage : null,
    zExact: view ? view.z : null,
    log10Z: view ? view.log10_z : null,
    recommendedControl: view ? view.recommended_control : null,
    margin: view ? view.margin : null,
    stopped: view ? view.stopped : false,
    decision: view ? view.decision : null,
    decisionLabel: view?.decision ? DECISION_LABELS[view.decision] ?? view.decision : null,
    forcedStop: view ? view.forced_stop : false,
    history: view ? view.history : [],
    outcomes: meta ? meta.model.outcomes : [],
    inputsEnabled: state.phase === "live" && !state.inFlight,
    pathologyBanner: meta?.pathological
      ? "Pathological continuation region: sampling may continue indefinitely under H1."
      : null,
    error: state.error,
    chart: {
      points: state.trajectory.map((log10Z, stage) => ({ stage, log10Z })),
      interval,
    },
  };
}
