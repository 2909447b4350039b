/**
 * View state: what the debugger panes show.  The current event view is
 * always a verbatim service payload for the cursor — there is no
 * client-side simulation, so reducers only move payloads around.
 */

import type { BreakpointSpec, EventView } from "./protocol.js";

export type DisplayMode = "raw" | "pretty";

export interface ViewState {
  session: string | null;
  programText: string;
  queryText: string;
  canonicalText: string;
  showCanonical: boolean;
  mode: DisplayMode;
  current: EventView | null;
  /** highest journal index seen so far (scrubber range) */
  maxIndex: number;
  /** indices visited, in visit order */
  timeline: number[];
  breakpoints: BreakpointSpec[];
  banner: string | null;
  connected: boolean;
}

export function initialState(): ViewState {
  return {
    session: null,
    programText: "",
    queryText: "",
    canonicalText: "",
    showCanonical: false,
    mode: "pretty",
    current: null,
    maxIndex: 0,
    timeline: [],
    breakpoints: [],
    banner: null,
    connected: false,
  };
}

export function sessionCreated(
  state: ViewState,
  session: string,
  view: EventView,
  canonical: string,
  programText: string,
  queryText: string,
): ViewState {
  return {
    ...state,
    session,
    programText,
    queryText,
    canonicalText: canonical,
    current: view,
    maxIndex: view.index,
    timeline: [view.index],
    banner: null,
    connected: true,
  };
}

export function viewArrived(state: ViewState, view: EventView): ViewState {
  return {
    ...state,
    current: view,
    maxIndex: Math.max(state.maxIndex, view.index),
    timeline: [...state.timeline, view.index],
  };
}

export function boundaryHit(
  state: ViewState,
  boundary: "initial" | "final" | "breakpoint",
): ViewState {
  const text =
    boundary === "initial"
      ? "at the initial event"
      : boundary === "final"
        ? "at the final event"
        : "stopped at a breakpoint";
  return { ...state, banner: text };
}

export function bannerCleared(state: ViewState): ViewState {
  return { ...state, banner: null };
}

export function connectionLost(state: ViewState): ViewState {
  return { ...state, connected: false, banner: "connection lost — reconnecting" };
}

export function reconnected(state: ViewState, view: EventView): ViewState {
  return { ...state, connected: true, banner: null, current: view };
}

export function modeToggled(state: ViewState, mode: DisplayMode): ViewState {
  return { ...state, mode };
}

export function canonicalToggled(state: ViewState): ViewState {
  return { ...state, showCanonical: !state.showCanonical };
}

export function breakpointsChanged(
  state: ViewState,
  breakpoints: BreakpointSpec[],
): ViewState {
  return { ...state, breakpoints };
}

/** Which steps get the cursor from here to a scrubbed index. */
export function stepsToReach(
  state: ViewState,
  target: number,
): { direction: "fwd" | "back"; count: number } | null {
  if (!state.current) return null;
  const clamped = Math.max(0, Math.min(target, state.maxIndex));
  const delta = clamped - state.current.index;
  if (delta === 0) return null;
  return delta > 0
    ? { direction: "fwd", count: delta }
    : { direction: "back", count: -delta };
}
