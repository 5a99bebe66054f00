// Payloads recorded verbatim from a live `seqctl serve` run on the
// two-coin model with lambda0 = lambda1 = 5. Contract tests assert the
// console lifts these fields without recomputation.

import { Meta, SessionView } from "../src/types.js";

export const initialView: SessionView = {
  id: "2d0b075a4a4a",
  stage: 0,
  z: "1",
  log10_z: 0.0,
  recommended_control: "a",
  stopped: false,
  decision: null,
  margin: 0.25,
  forced_stop: false,
  history: [],
};

export const stoppedView: SessionView = {
  id: "2d0b075a4a4a",
  stage: 1,
  z: "3/2",
  log10_z: 0.17609125905568124,
  recommended_control: null,
  stopped: true,
  decision: "REJECT_H0",
  margin: -0.375,
  forced_stop: false,
  history: [{ control: "a", outcome: "1" }],
};

export const meta: Meta = {
  model: {
    controls: ["a", "b"],
    outcomes: ["0", "1"],
    pmf0: { a: ["1/2", "1/2"], b: ["1/2", "1/2"] },
    pmf1: { a: ["1/4", "3/4"], b: ["1/3", "2/3"] },
  },
  cost: { lambda0: "5", lambda1: "5", pi0: "1", pi1: "0" },
  strategy: { kind: "LimitPolicyStrategy", depth_cap: 1000, grid_points: 2001, tol: 1e-9 },
  region: {
    kind: "INTERVAL",
    lower: 0.9333333333333302,
    upper: 1.1999999999999962,
    diagnostic: "continue exactly while the ratio stays inside (lower, upper)",
    pathological: false,
  },
  pathological: false,
  fingerprint: "0123456789abcdef",
};

export const pathologicalMeta: Meta = {
  ...meta,
  region: {
    kind: "NOT_INTERVAL",
    lower: null,
    upper: null,
    diagnostic: "continuation persists as the ratio grows without bound",
    pathological: true,
  },
  pathological: true,
};
