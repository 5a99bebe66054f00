// Contract tests: the UI model is the recorded service payload, verbatim.

import { describe, expect, it } from "vitest";

import { buildUiModel } from "../src/render.js";
import { ConsoleState } from "../src/state.js";
import { initialView, meta, pathologicalMeta, stoppedView } from "./fixtures.js";

function state(partial: Partial<ConsoleState>): ConsoleState {
  return {
    phase: "live",
    meta,
    view: initialView,
    trajectory: [0.0],
    inFlight: false,
    error: null,
    pendingOutcome: null,
    ...partial,
  };
}

describe("buildUiModel", () => {
  it("lifts the initial payload verbatim and enables input", () => {
    const ui = buildUiModel(state({}));
    expect(ui.stage).toBe(initialView.stage);
    expect(ui.zExact).toBe(initialView.z);
    expect(ui.log10Z).toBe(initialView.log10_z);
    expect(ui.recommendedControl).toBe("a");
    expect(ui.margin).toBe(initialView.margin);
    expect(ui.stopped).toBe(false);
    expect(ui.inputsEnabled).toBe(true);
    expect(ui.outcomes).toEqual(meta.model.outcomes);
    expect(ui.pathologyBanner).toBeNull();
  });

  it("disables input and shows the decision when stopped", () => {
    const ui = buildUiModel(state({
      phase: "finished",
      view: stoppedView,
      trajectory: [0.0, stoppedView.log10_z],
    }));
    expect(ui.stopped).toBe(true);
    expect(ui.decision).toBe("REJECT_H0");
    expect(ui.decisionLabel).toBe("Reject H0");
    expect(ui.zExact).toBe("3/2");
    expect(ui.inputsEnabled).toBe(false);
    expect(ui.history).toEqual(stoppedView.history);
  });

  it("locks input while a request is in flight", () => {
    const ui = buildUiModel(state({ inFlight: true }));
    expect(ui.inputsEnabled).toBe(false);
  });

  it("shades the continuation interval only for INTERVAL regions", () => {
    const withInterval = buildUiModel(state({}));
    expect(withInterval.chart.interval).toEqual({
      lower: meta.region!.lower,
      upper: meta.region!.upper,
    });
    const without = buildUiModel(state({ meta: pathologicalMeta }));
    expect(without.chart.interval).toBeNull();
  });

  it("raises a persistent warning banner on pathological regions", () => {
    const ui = buildUiModel(state({ meta: pathologicalMeta }));
    expect(ui.pathologyBanner).toMatch(/indefinitely/);
    const stopped = buildUiModel(state({
      meta: pathologicalMeta, phase: "finished", view: stoppedView,
    }));
    expect(stopped.pathologyBanner).toMatch(/indefinitely/);
  });

  it("charts the server-reported trajectory without recomputation", () => {
    const ui = buildUiModel(state({
      view: stoppedView,
      trajectory: [0.0, stoppedView.log10_z],
    }));
    expect(ui.chart.points).toEqual([
      { stage: 0, log10Z: 0.0 },
      { stage: 1, log10Z: stoppedView.log10_z },
    ]);
  });

  it("surfaces errors with the raw body and a retry affordance", () => {
    const ui = buildUiModel(state({
      phase: "error",
      error: { message: "boom", rawBody: "<html>oops</html>", retryable: true },
    }));
    expect(ui.error?.rawBody).toBe("<html>oops</html>");
    expect(ui.error?.retryable).toBe(true);
    expect(ui.inputsEnabled).toBe(false);
  });
});
