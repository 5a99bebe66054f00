// DOM layer: renders a UiModel into the page. Kept dumb on purpose; all
// decisions about what to show live in render.ts.

import { UiModel } from "./render.js";

export interface Handlers {
  onOutcome: (outcome: string) => void;
  onRetry: () => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function chartSvg(model: UiModel): SVGSVGElement {
  const W = 560, H = 180, PAD = 28;
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "chart");
  const points = model.chart.points.filter(p => p.log10Z !== null) as
    { stage: number; log10Z: number }[];
  const stages = Math.max(model.chart.points.length - 1, 1);
  const ys = points.map(p => p.log10Z);
  const extra = model.chart.interval
    ? [Math.log10(model.chart.interval.lower), Math.log10(model.chart.interval.upper)]
    : [];
  const lo = Math.min(-0.5, ...ys, ...extra);
  const hi = Math.max(0.5, ...ys, ...extra);
  const sx = (stage: number) => PAD + (stage / stages) * (W - 2 * PAD);
  const sy = (v: number) => H - PAD - ((v - lo) / (hi - lo)) * (H - 2 * PAD);

  if (model.chart.interval) {
    const band = document.createElementNS(svg.namespaceURI, "rect");
    const top = sy(Math.log10(model.chart.interval.upper));
    const bottom = sy(Math.log10(model.chart.interval.lower));
    band.setAttribute("x", String(PAD));
    band.setAttribute("width", String(W - 2 * PAD));
    band.setAttribute("y", String(top));
    band.setAttribute("height", String(Math.max(bottom - top, 1)));
    band.setAttribute("class", "chart-band");
    svg.appendChild(band);
  }
  const axis = document.createElementNS(svg.namespaceURI, "line");
  axis.setAttribute("x1", String(PAD));
  axis.setAttribute("x2", String(W - PAD));
  axis.setAttribute("y1", String(sy(0)));
  axis.setAttribute("y2", String(sy(0)));
  axis.setAttribute("class", "chart-axis");
  svg.appendChild(axis);
  if (points.length > 0) {
    const path = document.createElementNS(svg.namespaceURI, "polyline");
    path.setAttribute("points", points.map(p => `${sx(p.stage)},${sy(p.log10Z)}`).join(" "));
    path.setAttribute("class", "chart-line");
    svg.appendChild(path);
    for (const p of points) {
      const dot = document.createElementNS(svg.namespaceURI, "circle");
      dot.setAttribute("cx", String(sx(p.stage)));
      dot.setAttribute("cy", String(sy(p.log10Z)));
      dot.setAttribute("r", "3");
      dot.setAttribute("class", "chart-dot");
      svg.appendChild(dot);
    }
  }
  return svg;
}

export function render(root: HTMLElement, model: UiModel, handlers: Handlers): void {
  root.innerHTML = "";
  const main = el("div", "console");

  if (model.pathologyBanner) {
    const banner = el("div", "banner banner-warning", model.pathologyBanner);
    banner.setAttribute("role", "alert");
    main.appendChild(banner);
  }

  if (model.phase === "connecting") {
    main.appendChild(el("p", "status", "Connecting to the session service..."));
    root.appendChild(main);
    return;
  }

  if (model.error) {
    const panel = el("div", "panel panel-error");
    panel.appendChild(el("h2", undefined, "Service error"));
    panel.appendChild(el("p", "error-message", model.error.message));
    if (model.error.rawBody) {
      panel.appendChild(el("pre", "raw-body", model.error.rawBody));
    }
    if (model.error.retryable) {
      const retry = el("button", "retry", "Retry");
      retry.addEventListener("click", handlers.onRetry);
      panel.appendChild(retry);
    }
    main.appendChild(panel);
  }

  const status = el("section", "panel");
  status.appendChild(el("h1", undefined, "Sequential experiment console"));
  const grid = el("dl", "facts");
  const fact = (label: string, value: string) => {
    grid.appendChild(el("dt", undefined, label));
    grid.appendChild(el("dd", undefined, value));
  };
  fact("Stage", model.stage === null ? "-" : String(model.stage));
  fact("Likelihood ratio Z", model.zExact ?? "-");
  fact("log10 Z", model.log10Z === null ? "-" : String(model.log10Z));
  fact("Stop margin", model.margin === null ? "-" : String(model.margin));
  status.appendChild(grid);

  const verdict = el("div", model.stopped ? "verdict stopped" : "verdict live");
  verdict.setAttribute("role", "status");
  verdict.setAttribute("aria-live", "polite");
  if (model.stopped) {
    verdict.appendChild(el("strong", "decision-banner",
      `STOP — ${model.decisionLabel ?? "decision pending"}`));
    if (model.forcedStop) {
      verdict.appendChild(el("span", "forced", " (depth cap reached)"));
    }
  } else if (model.phase === "live") {
    verdict.appendChild(el("span", undefined, "CONTINUE — apply control "));
    verdict.appendChild(el("strong", "recommended-control",
      model.recommendedControl ?? "?"));
  }
  status.appendChild(verdict);
  main.appendChild(status);

  const entry = el("section", "panel");
  entry.appendChild(el("h2", undefined, "Record observed outcome"));
  const buttons = el("div", "outcomes");
  for (const outcome of model.outcomes) {
    const button = el("button", "outcome", outcome);
    button.disabled = !model.inputsEnabled;
    button.addEventListener("click", () => handlers.onOutcome(outcome));
    buttons.appendChild(button);
  }
  entry.appendChild(buttons);
  main.appendChild(entry);

  const chartPanel = el("section", "panel");
  chartPanel.appendChild(el("h2", undefined, "Ratio trajectory (log10 Z)"));
  chartPanel.appendChild(chartSvg(model));
  main.appendChild(chartPanel);

  const historyPanel = el("section", "panel");
  historyPanel.appendChild(el("h2", undefined, "History"));
  const list = el("ol", "history");
  for (const entryRow of model.history) {
    list.appendChild(el("li", undefined,
      `control ${entryRow.control} -> outcome ${entryRow.outcome}`));
  }
  historyPanel.appendChild(list);
  main.appendChild(historyPanel);

  root.appendChild(main);
}
