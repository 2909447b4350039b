"""Session-oriented debug service: line-delimited JSON over a local socket.

On connect the server sends a versioned hello line, then answers one request
per line.  Requests carry an "op" of create, step, continue,
set_breakpoints, export or dispose; responses are {"ok": true, "payload":
...} or {"err": true, "code": ..., "message": ..., "position"?: ...}.  Event
views serialize deterministically, so a view for a given cursor index is
byte-identical however the cursor got there.  The schema is documented in
docs/protocol.md.
"""

from __future__ import annotations

import json
import socketserver
import threading
import uuid
from dataclasses import dataclass

from .canonical import dump_canonical
from .engine import (
    DEFAULT_MAX_STEPS,
    FINAL,
    IMPOSSIBLE,
    EngineError,
    FreshCounter,
    Journal,
    JournalEntry,
    RESUME,
    computed_answer,
    initial_event,
    prepare,
    step_forward,
)
from .events import Event, Port
from .reader import PrologSyntaxError, format_term
from .terms import Atom, vars_of
from .tracer import VarNamer, format_ancestor, format_bet, structured_record, _render_event

PROTOCOL_HELLO = {"hello": "portstep-debug", "version": 1}


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class Breakpoint:
    port: str | None
    predicate: tuple[str, int] | None


class SessionError(Exception):
    def __init__(self, code: str, message: str, position=None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.position = position


class DebugSession:
    """One query under step control.  The journal only grows; backward
    movement is a cursor decrement."""

    def __init__(self, program_text: str, query_text: str, options: dict | None = None):
        options = options or {}
        self.id = uuid.uuid4().hex
        self.lock = threading.Lock()
        try:
            self.program, self.query = prepare(
                program_text,
                query_text,
                assume_canonical=bool(options.get("assume_canonical")),
            )
        except PrologSyntaxError as exc:
            raise SessionError(
                "parse-error", exc.message, {"line": exc.line, "col": exc.col}
            ) from exc
        except ValueError as exc:
            raise SessionError("canonical-error", str(exc)) from exc
        self.occurs_check = bool(options.get("occurs_check", True))
        self.max_steps = int(options.get("max_steps", DEFAULT_MAX_STEPS))
        self.fresh = FreshCounter(
            max(self.program.max_var_id(), *(v.id for v in vars_of(self.query)), -1) + 1
        )
        self.journal = Journal(self.program, occurs_check=self.occurs_check)
        self.journal.entries.append(
            JournalEntry(initial_event(self.query), None, self.fresh.value)
        )
        self.journal.final_counter = self.fresh.value
        self.cursor = 0
        self.breakpoints: list[Breakpoint] = []
        self.namer = VarNamer()
        self.namer.observe_event(self.journal.entries[0].event)
        self._finished = False  # final fail reached; nothing left to explore

    # -- journal growth -----------------------------------------------------

    def _extend(self) -> bool:
        """Append one event (or a resumption) to the journal; False at the end."""
        if self._finished:
            return False
        if len(self.journal.entries) >= self.max_steps:
            raise SessionError("budget", "step budget exhausted", {"index": self.cursor})
        last = self.journal.entries[-1].event
        before = self.fresh.value
        result = step_forward(last, self.program, self.fresh, self.occurs_check)
        if result is FINAL:
            if last.port is Port.FAIL:
                self._finished = True
                return False
            # explore further answers exactly like the enumeration driver
            resumed = Event(Port.REDO, last.goal, (), last.bstack)
            entry = JournalEntry(resumed, RESUME, self.fresh.value)
        elif result is IMPOSSIBLE:
            raise EngineError(f"journal event has no successor: {last!r}")
        else:
            entry = JournalEntry(result.event, result.rule, before)
        self.journal.entries.append(entry)
        self.journal.final_counter = self.fresh.value
        self.namer.observe_event(entry.event)
        return True

    def _at_final(self, index: int) -> bool:
        e = self.journal.entries[index].event
        if e.port not in (Port.EXIT, Port.FAIL) or e.astack:
            return False
        if e.port is Port.FAIL:
            return True
        # a top-level exit is final for the view even though stepping on
        # resumes the search
        return True

    # -- views ---------------------------------------------------------------

    def view(self, index: int) -> dict:
        entry = self.journal.entries[index]
        names = self.namer.names
        record = structured_record(index, entry.event, entry.rule, names)
        pretty_goal, _, _ = _render_event(entry.event, names, False, pretty=True)
        raw_line = (
            f"{record['port']} {record['goal']} "
            f"[{'·'.join(record['astack'] + ['nil'])}]"
            f"[{'·'.join(record['bstack'] + ['nil'])}]"
        )
        view = {
            "index": index,
            "record": record,
            "pretty_goal": pretty_goal,
            "indent": len(entry.event.astack),
            "raw_line": raw_line,
            "final": self._at_final(index),
            "diff": self._diff(index),
        }
        return view

    def _diff(self, index: int) -> dict | None:
        if index == 0:
            return None
        names = self.namer.names
        prev = self.journal.entries[index - 1].event
        cur = self.journal.entries[index].event

        def stack_diff(old, new, fmt):
            common = 0
            while (
                common < len(old)
                and common < len(new)
                and old[len(old) - 1 - common] == new[len(new) - 1 - common]
            ):
                common += 1
            return {
                "popped": len(old) - common,
                "pushed": [fmt(x, names) for x in new[: len(new) - common]],
            }

        return {
            "astack": stack_diff(prev.astack, cur.astack, format_ancestor),
            "bstack": stack_diff(
                prev.bstack, cur.bstack, lambda b, n: format_bet(b, n, False)
            ),
        }

    def _matches_breakpoint(self, e: Event) -> bool:
        for bp in self.breakpoints:
            if bp.port is not None and e.port.value != bp.port:
                continue
            if bp.predicate is not None:
                if not (isinstance(e.goal, Atom) and e.goal.indicator == bp.predicate):
                    continue
            return True
        return False

    # -- operations ----------------------------------------------------------

    def step(self, direction: str, count: int) -> dict:
        views, boundary = [], None
        if direction == "back":
            for _ in range(count):
                if self.cursor == 0:
                    boundary = "initial"
                    break
                self.cursor -= 1
                views.append(self.view(self.cursor))
        else:
            for _ in range(count):
                if self.cursor == len(self.journal.entries) - 1 and not self._extend():
                    boundary = "final"
                    break
                self.cursor += 1
                views.append(self.view(self.cursor))
                if self._matches_breakpoint(self.journal.entries[self.cursor].event):
                    boundary = "breakpoint"
                    break
        return {"views": views, "boundary": boundary}

    def continue_run(self, until: str) -> dict:
        while True:
            if self.cursor == len(self.journal.entries) - 1 and not self._extend():
                return {"view": self.view(self.cursor), "stop_reason": "final"}
            self.cursor += 1
            event = self.journal.entries[self.cursor].event
            if until == "answer" and event.port is Port.EXIT and not event.astack:
                answer = computed_answer(self.query, event.bstack)
                rendered = {
                    v.name: format_term(answer.get(v) or v, self.namer.names)
                    for v in vars_of(self.query)
                }
                return {
                    "view": self.view(self.cursor),
                    "stop_reason": "answer",
                    "answer": rendered,
                }
            if until == "breakpoint" and self._matches_breakpoint(event):
                return {"view": self.view(self.cursor), "stop_reason": "breakpoint"}

    def export(self) -> dict:
        names = self.namer.names
        return {
            "records": [
                structured_record(i, en.event, en.rule, names)
                for i, en in enumerate(self.journal.entries)
            ]
        }


class DebugService:
    """Session registry plus the request dispatcher (transport-agnostic)."""

    def __init__(self) -> None:
        self.sessions: dict[str, DebugSession] = {}
        self.lock = threading.Lock()

    def _session(self, msg: dict) -> DebugSession:
        sid = msg.get("session")
        with self.lock:
            session = self.sessions.get(sid)
        if session is None:
            raise SessionError("no-session", f"unknown session {sid!r}")
        return session

    def handle(self, msg: dict) -> dict:
        try:
            op = msg.get("op")
            if op == "create":
                session = DebugSession(
                    msg.get("program", ""), msg.get("query", ""), msg.get("options")
                )
                with self.lock:
                    self.sessions[session.id] = session
                return _ok(
                    {
                        "session": session.id,
                        "view": session.view(0),
                        "canonical": dump_canonical(session.program),
                    }
                )
            if op == "step":
                session = self._session(msg)
                direction = msg.get("direction", "fwd")
                if direction not in ("fwd", "back"):
                    raise SessionError("bad-request", f"bad direction {direction!r}")
                try:
                    count = int(msg.get("count", 1))
                except (TypeError, ValueError):
                    raise SessionError("bad-request", "count must be an integer")
                with session.lock:
                    return _ok(session.step(direction, count))
            if op == "continue":
                session = self._session(msg)
                until = msg.get("until", "final")
                if until not in ("breakpoint", "final", "answer"):
                    raise SessionError("bad-request", f"bad until {until!r}")
                with session.lock:
                    return _ok(session.continue_run(until))
            if op == "set_breakpoints":
                session = self._session(msg)
                bps = []
                raw_list = msg.get("breakpoints", [])
                if not isinstance(raw_list, list) or not all(
                    isinstance(raw, dict) for raw in raw_list
                ):
                    raise SessionError("bad-request", "breakpoints must be objects")
                for raw in raw_list:
                    port = raw.get("port")
                    if port is not None and port not in ("call", "exit", "fail", "redo"):
                        raise SessionError("bad-request", f"bad port {port!r}")
                    pred = raw.get("predicate")
                    indicator = None
                    if pred is not None:
                        name, _, arity = str(pred).partition("/")
                        if not arity.isdigit():
                            raise SessionError(
                                "bad-request", f"bad predicate indicator {pred!r}"
                            )
                        indicator = (name, int(arity))
                    bps.append(Breakpoint(port, indicator))
                with session.lock:
                    session.breakpoints = bps
                return _ok({"count": len(bps)})
            if op == "export":
                session = self._session(msg)
                with session.lock:
                    return _ok(session.export())
            if op == "dispose":
                sid = msg.get("session")
                with self.lock:
                    existed = self.sessions.pop(sid, None) is not None
                return _ok({"disposed": existed})
            raise SessionError("bad-request", f"unknown op {op!r}")
        except SessionError as exc:
            err = {"err": True, "code": exc.code, "message": exc.message}
            if exc.position is not None:
                err["position"] = exc.position
            return err
        except Exception as exc:  # malformed shapes must not kill the connection
            return {"err": True, "code": "internal-error", "message": str(exc)}


def _ok(payload: dict) -> dict:
    return {"ok": True, "payload": payload}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        self.wfile.write((_dumps(PROTOCOL_HELLO) + "\n").encode("utf-8"))
        self.wfile.flush()
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
                if not isinstance(msg, dict):
                    raise ValueError("request must be a JSON object")
            except ValueError as exc:
                response = {"err": True, "code": "bad-json", "message": str(exc)}
            else:
                response = self.server.service.handle(msg)
            self.wfile.write((_dumps(response) + "\n").encode("utf-8"))
            self.wfile.flush()


class DebugServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, port: int = 0, host: str = "127.0.0.1"):
        super().__init__((host, port), _Handler)
        self.service = DebugService()

    @property
    def port(self) -> int:
        return self.server_address[1]


def serve_forever(port: int) -> int:
    server = DebugServer(port)
    print(f"LISTENING {server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0
