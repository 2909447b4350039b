"""Test-side oracles and comparison utilities.

oracle_unify is an independent equation-solving unifier (substitute-through
on an equation set), kept deliberately separate from the library's
walk-based implementation so the two can cross-check each other.
"""

from __future__ import annotations

import re

from portstep import (
    Atom,
    Compound,
    Conj,
    Const,
    Disj,
    Event,
    FailGoal,
    Int,
    MguBet,
    PlainAtom,
    PlainOther,
    Port,
    Tag,
    TaggedConj,
    TaggedDisj,
    DefMemo,
    DisjMemo,
    Term,
    TrueGoal,
    Unify,
    Var,
)


# ---------------------------------------------------------------------------
# Independent unifier (Martelli-Montanari style equation solving)
# ---------------------------------------------------------------------------


def subst_into(mapping: dict[Var, Term], t: Term) -> Term:
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(subst_into(mapping, a) for a in t.args))
    return t


def _occurs_in(v: Var, t: Term) -> bool:
    if isinstance(t, Var):
        return v == t
    if isinstance(t, Compound):
        return any(_occurs_in(v, a) for a in t.args)
    return False


def oracle_unify(t1: Term, t2: Term) -> dict[Var, Term] | None:
    """Solve the equation set {t1 = t2}; always occurs-checked."""
    eqns = [(t1, t2)]
    unifier: dict[Var, Term] = {}
    while eqns:
        lhs, rhs = eqns.pop()
        if lhs == rhs:
            continue
        if isinstance(lhs, Compound) and isinstance(rhs, Compound):
            if lhs.functor != rhs.functor or len(lhs.args) != len(rhs.args):
                return None
            eqns.extend(zip(lhs.args, rhs.args))
            continue
        if not isinstance(lhs, Var):
            lhs, rhs = rhs, lhs
        if not isinstance(lhs, Var):
            return None  # two distinct non-variables
        if _occurs_in(lhs, rhs):
            return None
        single = {lhs: rhs}
        eqns = [(subst_into(single, a), subst_into(single, b)) for a, b in eqns]
        unifier = {v: subst_into(single, t) for v, t in unifier.items()}
        unifier[lhs] = rhs
    return unifier


# ---------------------------------------------------------------------------
# Literal fold of the current-substitution equations
# ---------------------------------------------------------------------------


def fold_current(bstack, x):
    """subst_of re-derived from its defining equations, cons-cell style."""
    if not bstack:
        return x
    rest = fold_current(bstack[1:], x)
    top = bstack[0]
    if isinstance(top, MguBet):
        return top.subst.apply(rest)
    return rest


# ---------------------------------------------------------------------------
# Alpha comparison
# ---------------------------------------------------------------------------


class _Bij:
    def __init__(self):
        self.fwd: dict[Var, Var] = {}
        self.rev: dict[Var, Var] = {}

    def match(self, a: Var, b: Var) -> bool:
        if a in self.fwd:
            return self.fwd[a] == b and self.rev.get(b) == a
        if b in self.rev:
            return False
        self.fwd[a] = b
        self.rev[b] = a
        return True


def _alpha(a, b, bij: _Bij) -> bool:
    if isinstance(a, Var) or isinstance(b, Var):
        return isinstance(a, Var) and isinstance(b, Var) and bij.match(a, b)
    if type(a) is not type(b):
        return False
    if isinstance(a, (Const, Int, TrueGoal, FailGoal, Port, Tag)):
        return a == b
    if isinstance(a, Compound):
        return (
            a.functor == b.functor
            and len(a.args) == len(b.args)
            and all(_alpha(x, y, bij) for x, y in zip(a.args, b.args))
        )
    if isinstance(a, Unify):
        return _alpha(a.lhs, b.lhs, bij) and _alpha(a.rhs, b.rhs, bij)
    if isinstance(a, Atom):
        return _alpha(a.pred, b.pred, bij)
    if isinstance(a, (Conj, Disj)):
        return _alpha(a.g1, b.g1, bij) and _alpha(a.g2, b.g2, bij)
    if isinstance(a, PlainAtom):
        return _alpha(a.atom, b.atom, bij)
    if isinstance(a, PlainOther):
        return _alpha(a.goal, b.goal, bij)
    if isinstance(a, (TaggedConj, TaggedDisj)):
        return a.tag == b.tag and _alpha(a.g1, b.g1, bij) and _alpha(a.g2, b.g2, bij)
    if isinstance(a, MguBet):
        da, db = dict(a.subst.items()), dict(b.subst.items())
        if len(da) != len(db):
            return False
        # match bindings through the bijection; domain order may differ
        for v, t in da.items():
            w = bij.fwd.get(v)
            if w is None:
                candidates = [u for u in db if u not in bij.rev]
                for u in candidates:
                    if v.name == u.name and _alpha(v, u, bij) and _alpha(t, db[u], bij):
                        break
                else:
                    return False
            else:
                if w not in db or not _alpha(t, db[w], bij):
                    return False
        return True
    if isinstance(a, DefMemo):
        return _alpha(a.body, b.body, bij) and _alpha(a.atom, b.atom, bij)
    if isinstance(a, DisjMemo):
        return (
            a.tag == b.tag
            and _alpha(a.chosen, b.chosen, bij)
            and _alpha(a.g1, b.g1, bij)
            and _alpha(a.g2, b.g2, bij)
        )
    if isinstance(a, Event):
        return (
            a.port == b.port
            and _alpha(a.goal, b.goal, bij)
            and len(a.astack) == len(b.astack)
            and len(a.bstack) == len(b.bstack)
            and all(_alpha(x, y, bij) for x, y in zip(a.astack, b.astack))
            and all(_alpha(x, y, bij) for x, y in zip(a.bstack, b.bstack))
        )
    return a == b


def underdetermined_shape_ok(event, program) -> bool:
    """The documented inverse-stepping gaps: a defined atom's failure, and
    pops of conjunction components whose instance and raw form diverge."""
    if event.port is Port.FAIL and isinstance(event.goal, Atom):
        return event.goal.indicator in program.defs
    if event.port is Port.EXIT and isinstance(event.goal, Conj):
        return True
    if (
        event.port is Port.REDO
        and event.astack
        and isinstance(event.astack[0], TaggedConj)
        and event.astack[0].tag is Tag.FIRST
    ):
        return True
    return False


def events_alpha_equal(evs1, evs2) -> bool:
    """One shared variable bijection across a whole event sequence."""
    if len(evs1) != len(evs2):
        return False
    bij = _Bij()
    return all(_alpha(a, b, bij) for a, b in zip(evs1, evs2))


def answers_match(ans1, ans2, qvars) -> bool:
    """Answer sequences equal in order, each pair equal up to renaming."""
    if len(ans1) != len(ans2):
        return False
    for s1, s2 in zip(ans1, ans2):
        t1 = Compound("ans", tuple(s1.get(v) or v for v in qvars)) if qvars else Const("ans")
        t2 = Compound("ans", tuple(s2.get(v) or v for v in qvars)) if qvars else Const("ans")
        if not _alpha(t1, t2, _Bij()):
            return False
    return True


# ---------------------------------------------------------------------------
# Trace-text utilities
# ---------------------------------------------------------------------------

_VAR_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+|.")


def alpha_normalize_trace(text: str) -> str:
    """Rename variable tokens to V0, V1, ... in first-appearance order."""
    mapping: dict[str, str] = {}
    out = []
    for line in text.splitlines():
        pieces = []
        for tok in _VAR_TOKEN.findall(line):
            if re.fullmatch(r"[A-Z_][A-Za-z0-9_]*", tok):
                if tok not in mapping:
                    mapping[tok] = f"V{len(mapping)}"
                tok = mapping[tok]
            pieces.append(tok)
        out.append("".join(pieces))
    return "\n".join(out) + ("\n" if text.endswith("\n") else "")


def normalize_ws(text: str) -> str:
    lines = [" ".join(line.split()) for line in text.strip().splitlines()]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Fixture trace parser (raw lines back into events)
# ---------------------------------------------------------------------------


def parse_trace(text: str) -> list[Event]:
    from portstep import parse_query

    scope: dict[str, Var] = {}
    counter = [0]

    def parse_goal_text(s: str):
        # reuse the real parser, then re-map variables into one shared scope
        g = parse_query(s, start_id=10_000 + 100 * counter[0])
        counter[0] += 1
        return _rescope(g)

    def _rescope(x):
        if isinstance(x, Var):
            v = scope.get(x.name if x.name != "_" else f"_anon{x.id}")
            if v is None:
                v = Var(len(scope), x.name)
                scope[x.name if x.name != "_" else f"_anon{x.id}"] = v
            return v
        if isinstance(x, Compound):
            return Compound(x.functor, tuple(_rescope(a) for a in x.args))
        if isinstance(x, Unify):
            return Unify(_rescope(x.lhs), _rescope(x.rhs))
        if isinstance(x, Atom):
            return Atom(_rescope(x.pred))
        if isinstance(x, Conj):
            return Conj(_rescope(x.g1), _rescope(x.g2))
        if isinstance(x, Disj):
            return Disj(_rescope(x.g1), _rescope(x.g2))
        return x

    def parse_ancestor(s: str):
        m = re.match(r"([12])/(.*)$", s)
        if m:
            g = parse_goal_text(m.group(2))
            tag = Tag.FIRST if m.group(1) == "1" else Tag.SECOND
            if isinstance(g, Conj):
                return TaggedConj(tag, g.g1, g.g2)
            assert isinstance(g, Disj), s
            return TaggedDisj(tag, g.g1, g.g2)
        g = parse_goal_text(s)
        assert isinstance(g, Atom), s
        return PlainAtom(g)

    def parse_bet(s: str):
        from portstep import Subst

        if s.startswith("{"):
            assert s.endswith("}")
            inside = s[1:-1]
            bindings = {}
            if inside:
                for piece in inside.split(","):
                    vname, _, tname = piece.partition("/")
                    v = _rescope(Var(-1, vname))
                    from portstep.reader import _Parser, _counter

                    t = _rescope(_Parser(tname, _counter(50_000)).term())
                    bindings[v] = t
            return MguBet(Subst(bindings))
        if "▸" in s:
            body_text, _, atom_text = s.partition("▸")
            body = parse_goal_text(_strip_parens(body_text))
            atom = parse_goal_text(atom_text)
            assert isinstance(atom, Atom)
            return DefMemo(body, atom)
        assert "↣" in s, s
        chosen_text, _, rest = s.partition("↣")
        m = re.fullmatch(r"\(([12])/(.*)\)", rest)
        assert m, s
        chosen = parse_goal_text(_strip_parens(chosen_text))
        pair = parse_goal_text(m.group(2))
        assert isinstance(pair, Disj)
        tag = Tag.FIRST if m.group(1) == "1" else Tag.SECOND
        return DisjMemo(chosen, tag, pair.g1, pair.g2)

    def _strip_parens(s: str) -> str:
        return s[1:-1] if s.startswith("(") and s.endswith(")") else s

    def split_stack(s: str) -> list[str]:
        parts = s.split("·")
        assert parts[-1] == "nil", s
        return parts[:-1]

    events = []
    for line in text.strip().splitlines():
        m = re.fullmatch(r"\s*(call|exit|fail|redo) (.*) \[(.*)\]\[(.*)\]", line)
        assert m, line
        port = Port(m.group(1))
        goal = parse_goal_text(_strip_parens(m.group(2)))
        astack = tuple(parse_ancestor(p) for p in split_stack(m.group(3)))
        bstack = tuple(parse_bet(p) for p in split_stack(m.group(4)))
        events.append(Event(port, goal, astack, bstack))
    return events
