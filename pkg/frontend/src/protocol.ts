/**
 * Wire types for the debug service (see ../../docs/protocol.md).
 *
 * Every displayed value in the UI originates from these payloads; the
 * client never recomputes goals, stacks or substitutions.
 */

export type PortName = "call" | "exit" | "fail" | "redo";

export interface StructuredRecord {
  index: number;
  port: PortName;
  goal: string;
  astack: string[];
  bstack: string[];
  rule_applied: string;
}

export interface StackDiff {
  popped: number;
  pushed: string[];
}

export interface EventView {
  index: number;
  record: StructuredRecord;
  pretty_goal: string;
  indent: number;
  raw_line: string;
  final: boolean;
  diff: { astack: StackDiff; bstack: StackDiff } | null;
}

export interface BreakpointSpec {
  port?: PortName;
  predicate?: string; // "name/arity"
}

export interface CreateOptions {
  assume_canonical?: boolean;
  occurs_check?: boolean;
  max_steps?: number;
}

export type Request =
  | { op: "create"; program: string; query: string; options?: CreateOptions }
  | { op: "step"; session: string; direction: "fwd" | "back"; count?: number }
  | { op: "continue"; session: string; until: "breakpoint" | "final" | "answer" }
  | { op: "set_breakpoints"; session: string; breakpoints: BreakpointSpec[] }
  | { op: "export"; session: string }
  | { op: "dispose"; session: string };

export interface CreatePayload {
  session: string;
  view: EventView;
  canonical: string;
}

export interface StepPayload {
  views: EventView[];
  boundary: "initial" | "final" | "breakpoint" | null;
}

export interface ContinuePayload {
  view: EventView;
  stop_reason: "final" | "answer" | "breakpoint";
  answer?: Record<string, string>;
}

export interface ExportPayload {
  records: StructuredRecord[];
}

export interface OkResponse {
  ok: true;
  payload: unknown;
}

export interface ErrResponse {
  err: true;
  code: string;
  message: string;
  position?: Record<string, number>;
}

export type Response = OkResponse | ErrResponse;

export interface Hello {
  hello: string;
  version: number;
}

export function isErr(r: Response): r is ErrResponse {
  return (r as ErrResponse).err === true;
}

export class ServiceError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly position?: Record<string, number>,
  ) {
    super(message);
  }
}
