// Wire types mirroring the seqctl service payloads. The console renders
// these fields verbatim; it never recomputes solver quantities.

export interface HistoryEntry {
  control: string;
  outcome: string;
}

export interface SessionView {
  id: string;
  stage: number;
  z: string; // exact rational as text, e.g. "3/2"
  log10_z: number | null;
  recommended_control: string | null;
  stopped: boolean;
  decision: string | null; // "REJECT_H0" | "ACCEPT_H0" | null
  margin: number | null;
  forced_stop: boolean;
  history: HistoryEntry[];
}

export interface RegionReport {
  kind: "INTERVAL" | "NOT_INTERVAL" | "ALL_STOP";
  lower: number | null;
  upper: number | null;
  diagnostic: string;
  pathological: boolean;
}

export interface Meta {
  model: {
    controls: string[];
    outcomes: string[];
    pmf0: Record<string, string[]>;
    pmf1: Record<string, string[]>;
  };
  cost: { lambda0: string; lambda1: string; pi0: string; pi1: string };
  strategy: Record<string, unknown>;
  region: RegionReport | null;
  pathological: boolean;
  fingerprint: string;
}

export interface ServiceError {
  code: string;
  message: string;
}

export function isSessionView(value: unknown): value is SessionView {
  if (typeof value !== "object" || value === null) return false;
  const v = value as Record<string, unknown>;
  return (
    typeof v.id === "string" &&
    typeof v.stage === "number" &&
    typeof v.z === "string" &&
    typeof v.stopped === "boolean" &&
    Array.isArray(v.history)
  );
}
