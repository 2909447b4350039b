/**
 * Debug-service client: sends one request line at a time and pairs each
 * response line with the oldest pending request (the protocol answers
 * strictly in order).  Raw response lines are kept alongside the parsed
 * payloads so callers can compare revisited views byte-for-byte.
 */

import { encodeLine } from "./framing.js";
import {
  type BreakpointSpec,
  type ContinuePayload,
  type CreateOptions,
  type CreatePayload,
  type EventView,
  type ExportPayload,
  type Hello,
  type Request,
  type Response,
  ServiceError,
  type StepPayload,
  isErr,
} from "./protocol.js";
import type { Transport } from "./transport.js";

interface Pending {
  resolve: (value: { payload: unknown; raw: string }) => void;
  reject: (err: Error) => void;
}

export class DebugClient {
  private pending: Pending[] = [];
  private helloPromise: Promise<Hello>;
  private closed = false;

  constructor(private readonly transport: Transport) {
    let helloResolve: (h: Hello) => void;
    let helloReject: (e: Error) => void;
    this.helloPromise = new Promise((res, rej) => {
      helloResolve = res;
      helloReject = rej;
    });
    let sawHello = false;
    transport.onLine((line) => {
      const message = JSON.parse(line) as Response | Hello;
      if (!sawHello) {
        sawHello = true;
        const hello = message as Hello;
        if (hello.hello === undefined) {
          helloReject(new Error(`expected a hello line, got ${line}`));
          return;
        }
        helloResolve(hello);
        return;
      }
      const waiter = this.pending.shift();
      if (!waiter) return;
      const response = message as Response;
      if (isErr(response)) {
        waiter.reject(
          new ServiceError(response.code, response.message, response.position),
        );
      } else {
        waiter.resolve({ payload: response.payload, raw: line });
      }
    });
    transport.onClose(() => {
      this.closed = true;
      const broken = new Error("connection closed");
      for (const waiter of this.pending.splice(0)) waiter.reject(broken);
    });
  }

  hello(): Promise<Hello> {
    return this.helloPromise;
  }

  private request(message: Request): Promise<{ payload: unknown; raw: string }> {
    if (this.closed) return Promise.reject(new Error("connection closed"));
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.transport.send(encodeLine(message));
    });
  }

  async create(
    program: string,
    query: string,
    options?: CreateOptions,
  ): Promise<CreatePayload> {
    const { payload } = await this.request({ op: "create", program, query, options });
    return payload as CreatePayload;
  }

  async step(
    session: string,
    direction: "fwd" | "back",
    count = 1,
  ): Promise<StepPayload> {
    const { payload } = await this.request({ op: "step", session, direction, count });
    return payload as StepPayload;
  }

  async continueRun(
    session: string,
    until: "breakpoint" | "final" | "answer",
  ): Promise<ContinuePayload> {
    const { payload } = await this.request({ op: "continue", session, until });
    return payload as ContinuePayload;
  }

  async setBreakpoints(session: string, breakpoints: BreakpointSpec[]): Promise<void> {
    await this.request({ op: "set_breakpoints", session, breakpoints });
  }

  async exportTrace(session: string): Promise<ExportPayload> {
    const { payload } = await this.request({ op: "export", session });
    return payload as ExportPayload;
  }

  async dispose(session: string): Promise<void> {
    await this.request({ op: "dispose", session });
  }

  /** The service has no view-by-index op; wiggle the cursor one step and
   * back to re-fetch the current view after a reconnect. */
  async refetchView(session: string, cursor: number): Promise<EventView> {
    if (cursor > 0) {
      await this.step(session, "back", 1);
      const fwd = await this.step(session, "fwd", 1);
      return fwd.views[0];
    }
    const fwd = await this.step(session, "fwd", 1);
    if (fwd.views.length === 0) {
      throw new Error("cannot refetch the view of a one-event journal");
    }
    const back = await this.step(session, "back", 1);
    return back.views[0];
  }

  close(): void {
    this.transport.close();
  }
}
