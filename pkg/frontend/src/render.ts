/**
 * Pure HTML renderers.  Every goal, stack element, port and rule string is
 * embedded verbatim (escaped) from service payloads; highlighting comes
 * from the service's diff annotations, never from client recomputation.
 */

import type { EventView, StackDiff } from "./protocol.js";
import type { ViewState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderPortBadge(port: string): string {
  return `<span class="port port-${escapeHtml(port)}" data-role="port">${escapeHtml(port)}</span>`;
}

export function renderGoal(view: EventView, mode: "raw" | "pretty"): string {
  const text = mode === "pretty" ? view.pretty_goal : view.record.goal;
  return `<code class="goal" data-role="goal">${escapeHtml(text)}</code>`;
}

export function renderStack(
  name: "astack" | "bstack",
  elements: string[],
  diff: StackDiff | null,
): string {
  const pushedCount = diff ? diff.pushed.length : 0;
  const items = elements
    .map((element, i) => {
      const pushed = i < pushedCount ? " pushed" : "";
      return `<li class="stack-item${pushed}" data-role="${name}-item">${escapeHtml(element)}</li>`;
    })
    .join("");
  const popped =
    diff && diff.popped > 0
      ? `<li class="stack-popped" data-role="${name}-popped">${diff.popped} popped</li>`
      : "";
  return `<ol class="stack ${name}" data-role="${name}">${popped}${items}<li class="stack-nil">nil</li></ol>`;
}

export function renderRule(view: EventView): string {
  return `<span class="rule" data-role="rule">${escapeHtml(view.record.rule_applied)}</span>`;
}

export function renderEventPane(state: ViewState): string {
  const view = state.current;
  if (!view) return `<section class="event-pane empty">no session</section>`;
  const finalMark = view.final ? `<span class="final-mark">final</span>` : "";
  return [
    `<section class="event-pane">`,
    `<header>`,
    `<span class="index" data-role="index">#${view.index}</span>`,
    renderPortBadge(view.record.port),
    renderGoal(view, state.mode),
    renderRule(view),
    finalMark,
    `</header>`,
    `<div class="stacks">`,
    `<div class="stack-col"><h3>A-stack</h3>`,
    renderStack("astack", view.record.astack, view.diff ? view.diff.astack : null),
    `</div>`,
    `<div class="stack-col"><h3>B-stack</h3>`,
    renderStack("bstack", view.record.bstack, view.diff ? view.diff.bstack : null),
    `</div>`,
    `</div>`,
    `</section>`,
  ].join("");
}

export function renderProgramPane(state: ViewState): string {
  const text = state.showCanonical ? state.canonicalText : state.programText;
  const label = state.showCanonical ? "canonical form" : "source";
  return [
    `<section class="program-pane">`,
    `<header><h3>program (${label})</h3>`,
    `<button id="toggle-canonical">${state.showCanonical ? "show source" : "show canonical"}</button>`,
    `</header>`,
    `<pre data-role="program-text">${escapeHtml(text)}</pre>`,
    `</section>`,
  ].join("");
}

export function renderTimeline(state: ViewState): string {
  const index = state.current ? state.current.index : 0;
  return [
    `<section class="timeline">`,
    `<input type="range" id="scrubber" min="0" max="${state.maxIndex}" value="${index}" ${state.session ? "" : "disabled"}>`,
    `<span class="timeline-label" data-role="timeline-label">${index} / ${state.maxIndex}</span>`,
    `</section>`,
  ].join("");
}

export function renderControls(state: ViewState): string {
  const atStart = !state.current || state.current.index === 0;
  const disabled = state.session ? "" : "disabled";
  return [
    `<section class="controls">`,
    `<button id="step-back" ${atStart || !state.session ? "disabled" : ""}>⟵ step</button>`,
    `<button id="step-fwd" ${disabled}>step ⟶</button>`,
    `<button id="continue-answer" ${disabled}>continue to answer</button>`,
    `<button id="continue-breakpoint" ${disabled}>continue to breakpoint</button>`,
    `<button id="new-query">new query</button>`,
    `<label><input type="checkbox" id="mode-raw" ${state.mode === "raw" ? "checked" : ""}> raw goals</label>`,
    `</section>`,
  ].join("");
}

export function renderBanner(state: ViewState): string {
  if (!state.banner) return "";
  const kind = state.connected ? "notice" : "reconnect";
  return `<div class="banner banner-${kind}" data-role="banner">${escapeHtml(state.banner)}</div>`;
}

export function renderApp(state: ViewState): string {
  return [
    renderBanner(state),
    renderControls(state),
    renderTimeline(state),
    renderEventPane(state),
    renderProgramPane(state),
  ].join("");
}
