import { Client } from "./api.js";
import { render } from "./dom.js";
import { buildUiModel } from "./render.js";
import { ConsoleStore } from "./state.js";

function baseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("service") ?? "http://127.0.0.1:8000";
}

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const store = new ConsoleStore(new Client(baseUrl()));
const handlers = {
  onOutcome: (outcome: string) => void store.submit(outcome),
  onRetry: () => void store.retry(),
};
store.subscribe(state => render(root, buildUiModel(state), handlers));
void store.start();
