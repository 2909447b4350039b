/** Browser entry point: wires the panes to a DebugClient over WebSocket
 * (run `npm run bridge` next to a `portstep --serve` process). */

import { DebugClient } from "./client.js";
import type { EventView, StepPayload } from "./protocol.js";
import { renderApp } from "./render.js";
import {
  type ViewState,
  bannerCleared,
  boundaryHit,
  breakpointsChanged,
  canonicalToggled,
  connectionLost,
  initialState,
  modeToggled,
  reconnected,
  sessionCreated,
  stepsToReach,
  viewArrived,
} from "./state.js";
import { webSocketTransport } from "./transport.js";

const BRIDGE_URL = "ws://127.0.0.1:7072";

let state: ViewState = initialState();
let client: DebugClient | null = null;

function update(next: ViewState): void {
  state = next;
  const root = document.getElementById("app");
  if (root) {
    root.innerHTML = renderApp(state);
    wireControls();
  }
}

function applyStep(payload: StepPayload): void {
  let next = state;
  for (const view of payload.views) next = viewArrived(next, view);
  if (payload.boundary) next = boundaryHit(next, payload.boundary);
  else next = bannerCleared(next);
  update(next);
}

async function connect(): Promise<DebugClient> {
  const transport = await webSocketTransport(BRIDGE_URL);
  const fresh = new DebugClient(transport);
  await fresh.hello();
  transport.onClose(() => {
    update(connectionLost(state));
    void reconnect();
  });
  return fresh;
}

async function reconnect(): Promise<void> {
  for (;;) {
    try {
      client = await connect();
      if (state.session && state.current) {
        const view = await client.refetchView(state.session, state.current.index);
        update(reconnected(state, view));
      }
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 1000));
    }
  }
}

async function newSession(): Promise<void> {
  if (!client) return;
  const program = (document.getElementById("program-input") as HTMLTextAreaElement)
    .value;
  const query = (document.getElementById("query-input") as HTMLInputElement).value;
  try {
    const created = await client.create(program, query);
    update(
      sessionCreated(state, created.session, created.view, created.canonical, program, query),
    );
  } catch (err) {
    update({ ...state, banner: String(err) });
  }
}

function wireControls(): void {
  const on = (id: string, handler: () => void) => {
    const el = document.getElementById(id);
    if (el) el.onclick = handler;
  };
  on("step-fwd", () => void doStep("fwd", 1));
  on("step-back", () => void doStep("back", 1));
  on("continue-answer", () => void doContinue("answer"));
  on("continue-breakpoint", () => void doContinue("breakpoint"));
  on("new-query", () => void newSession());
  on("toggle-canonical", () => update(canonicalToggled(state)));
  const raw = document.getElementById("mode-raw") as HTMLInputElement | null;
  if (raw) raw.onchange = () => update(modeToggled(state, raw.checked ? "raw" : "pretty"));
  const scrubber = document.getElementById("scrubber") as HTMLInputElement | null;
  if (scrubber)
    scrubber.onchange = () => {
      const plan = stepsToReach(state, Number(scrubber.value));
      if (plan) void doStep(plan.direction, plan.count);
    };
  const bpForm = document.getElementById("breakpoint-form") as HTMLFormElement | null;
  if (bpForm)
    bpForm.onsubmit = (ev) => {
      ev.preventDefault();
      void applyBreakpoints();
    };
}

async function doStep(direction: "fwd" | "back", count: number): Promise<void> {
  if (!client || !state.session) return;
  applyStep(await client.step(state.session, direction, count));
}

async function doContinue(until: "answer" | "breakpoint"): Promise<void> {
  if (!client || !state.session) return;
  const payload = await client.continueRun(state.session, until);
  let next = viewArrived(state, payload.view as EventView);
  if (payload.stop_reason === "answer" && payload.answer) {
    const bindings = Object.entries(payload.answer)
      .map(([name, term]) => `${name} = ${term}`)
      .join(", ");
    next = { ...next, banner: `answer: ${bindings || "true"}` };
  } else {
    next = boundaryHit(next, payload.stop_reason === "final" ? "final" : "breakpoint");
  }
  update(next);
}

async function applyBreakpoints(): Promise<void> {
  if (!client || !state.session) return;
  const port = (document.getElementById("bp-port") as HTMLSelectElement).value;
  const predicate = (document.getElementById("bp-pred") as HTMLInputElement).value;
  const spec: { port?: string; predicate?: string } = {};
  if (port) spec.port = port;
  if (predicate) spec.predicate = predicate;
  const breakpoints = port || predicate ? [spec] : [];
  await client.setBreakpoints(state.session, breakpoints as never);
  update(breakpointsChanged(state, breakpoints as never));
}

void (async () => {
  await reconnect();
  update(state);
})();
