"""Surface syntax: parse pure-Prolog programs and queries, print them back.

The grammar is deliberately closed: clauses `H.` and `H :- B.`; goal
operators `;` (1100, right), `,` (1000, right) and `=` (700, non-assoc);
lowercase atoms with optional argument lists; variables starting uppercase
or `_`; unsigned integers; `true`/`fail`; list sugar `[]`/`[H|T]`; `%` line
comments.  Formatting is deterministic and emits only the parentheses the
precedence table forces, so parse(format(x)) is identity up to variable ids.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .terms import (
    Atom,
    Compound,
    Conj,
    Const,
    Disj,
    FAIL,
    FailGoal,
    Goal,
    Int,
    TRUE,
    Term,
    TrueGoal,
    Unify,
    Var,
)


class PrologSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: Goal | None  # None for facts


@dataclass
class SourceProgram:
    clauses: list[Clause] = field(default_factory=list)

    def max_var_id(self) -> int:
        top = -1
        for c in self.clauses:
            for v in _clause_vars(c):
                top = max(top, v.id)
        return top


def _clause_vars(c: Clause):
    from .terms import vars_of

    yield from vars_of(c.head)
    if c.body is not None:
        yield from vars_of(c.body)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<neck>:-)
    | (?P<int>\d+)
    | (?P<var>[A-Z_][A-Za-z0-9_]*)
    | (?P<name>[a-z][A-Za-z0-9_]*)
    | (?P<punct>[()\[\],;|=.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "neck" | "int" | "var" | "name" | "punct" | "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PrologSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, lexeme, line, pos - line_start + 1))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, next_id: Callable[[], int]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.next_id = next_id
        self.scope: dict[str, Var] = {}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise PrologSyntaxError(
                f"expected {text!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return self.take()

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind != "eof" and tok.text == text

    def fail(self, message: str) -> PrologSyntaxError:
        tok = self.peek()
        return PrologSyntaxError(message, tok.line, tok.col)

    # -- variables ----------------------------------------------------------

    def variable(self, name: str) -> Var:
        if name == "_":
            return Var(self.next_id(), "_")
        v = self.scope.get(name)
        if v is None:
            v = Var(self.next_id(), name)
            self.scope[name] = v
        return v

    # -- terms --------------------------------------------------------------

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "var":
            self.take()
            return self.variable(tok.text)
        if tok.kind == "int":
            self.take()
            return Int(int(tok.text))
        if tok.kind == "name":
            self.take()
            if self.at("("):
                self.take()
                args = [self.term()]
                while self.at(","):
                    self.take()
                    args.append(self.term())
                self.expect(")")
                return Compound(tok.text, tuple(args))
            return Const(tok.text)
        if tok.text == "[":
            return self.list_term()
        raise self.fail(f"expected a term, found {tok.text or 'end of input'!r}")

    def list_term(self) -> Term:
        self.expect("[")
        if self.at("]"):
            self.take()
            return Const("[]")
        elems = [self.term()]
        while self.at(","):
            self.take()
            elems.append(self.term())
        tail: Term = Const("[]")
        if self.at("|"):
            self.take()
            tail = self.term()
        self.expect("]")
        for e in reversed(elems):
            tail = Compound(".", (e, tail))
        return tail

    # -- goals --------------------------------------------------------------

    def goal(self) -> Goal:
        left = self.conjunction()
        if self.at(";"):
            self.take()
            return Disj(left, self.goal())
        return left

    def conjunction(self) -> Goal:
        left = self.unit_goal()
        if self.at(","):
            self.take()
            return Conj(left, self.conjunction())
        return left

    def unit_goal(self) -> Goal:
        tok = self.peek()
        if tok.text == "(":
            self.take()
            g = self.goal()
            self.expect(")")
            return g
        if tok.kind == "name" and tok.text in ("true", "fail"):
            nxt = self.tokens[self.pos + 1]
            if nxt.text != "(":
                self.take()
                return TRUE if tok.text == "true" else FAIL
        t = self.term()
        if self.at("="):
            self.take()
            return Unify(t, self.term())
        if isinstance(t, (Const, Compound)):
            return Atom(t)
        raise PrologSyntaxError(
            f"a bare {type(t).__name__.lower()} is not a goal", tok.line, tok.col
        )

    # -- clauses ------------------------------------------------------------

    def clause(self) -> Clause:
        tok = self.peek()
        head = self.unit_goal()
        if not isinstance(head, Atom):
            raise PrologSyntaxError(
                "clause head must be a user predication, not true/fail/=",
                tok.line,
                tok.col,
            )
        body: Goal | None = None
        if self.at(":-"):
            self.take()
            body = self.goal()
        self.expect(".")
        return Clause(head, body)

    def program(self) -> SourceProgram:
        clauses = []
        while self.peek().kind != "eof":
            self.scope = {}
            clauses.append(self.clause())
        return SourceProgram(clauses)


def _counter(start: int) -> Callable[[], int]:
    box = [start]

    def nxt() -> int:
        v = box[0]
        box[0] += 1
        return v

    return nxt


def parse_program(text: str, start_id: int = 0) -> SourceProgram:
    """Parse a program; variable scope is per clause, `_` is always fresh."""
    return _Parser(text, _counter(start_id)).program()


def parse_query(text: str, start_id: int = 0) -> Goal:
    """Parse a query goal; the whole query is one variable scope."""
    p = _Parser(text, _counter(start_id))
    g = p.goal()
    tok = p.peek()
    if p.at("."):
        p.take()
        tok = p.peek()
    if tok.kind != "eof":
        raise PrologSyntaxError(f"unexpected {tok.text!r} after query", tok.line, tok.col)
    return g


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

_DISJ_PREC = 1100
_CONJ_PREC = 1000
_UNIFY_PREC = 700


def format_term(t: Term, names: Mapping[Var, str] | None = None) -> str:
    if isinstance(t, Var):
        return names[t] if names and t in names else t.name
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Compound):
        if t.functor == "." and len(t.args) == 2:
            return _format_list(t, names)
        inner = ",".join(format_term(a, names) for a in t.args)
        return f"{t.functor}({inner})"
    raise TypeError(f"not a term: {t!r}")


def _format_list(t: Term, names: Mapping[Var, str] | None) -> str:
    elems: list[str] = []
    while isinstance(t, Compound) and t.functor == "." and len(t.args) == 2:
        elems.append(format_term(t.args[0], names))
        t = t.args[1]
    body = ",".join(elems)
    if isinstance(t, Const) and t.name == "[]":
        return f"[{body}]"
    return f"[{body}|{format_term(t, names)}]"


def format_goal(
    g: Goal, names: Mapping[Var, str] | None = None, max_prec: int = 1200
) -> str:
    """Minimal-parenthesis goal text per the operator table."""
    if isinstance(g, TrueGoal):
        return "true"
    if isinstance(g, FailGoal):
        return "fail"
    if isinstance(g, Atom):
        return format_term(g.pred, names)
    if isinstance(g, Unify):
        text = f"{format_term(g.lhs, names)}={format_term(g.rhs, names)}"
        return f"({text})" if _UNIFY_PREC > max_prec else text
    if isinstance(g, Conj):
        text = (
            f"{format_goal(g.g1, names, _CONJ_PREC - 1)},"
            f"{format_goal(g.g2, names, _CONJ_PREC)}"
        )
        return f"({text})" if _CONJ_PREC > max_prec else text
    if isinstance(g, Disj):
        text = (
            f"{format_goal(g.g1, names, _DISJ_PREC - 1)};"
            f"{format_goal(g.g2, names, _DISJ_PREC)}"
        )
        return f"({text})" if _DISJ_PREC > max_prec else text
    raise TypeError(f"not a goal: {g!r}")


def format_clause(c: Clause, names: Mapping[Var, str] | None = None) -> str:
    head = format_term(c.head.pred, names)
    if c.body is None:
        return f"{head}."
    return f"{head} :- {format_goal(c.body, names)}."


def format_program(p: SourceProgram) -> str:
    return "\n".join(format_clause(c) for c in p.clauses) + ("\n" if p.clauses else "")
