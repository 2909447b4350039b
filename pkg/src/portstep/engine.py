"""The port-transition engine.

step_forward implements the 21 transition rules, dispatching on the port,
the goal shape, the top ancestor and the top bet.  Guards are mutually
exclusive by construction and every step audits that at most one rule fired.
Execution histories are kept in a Journal, which records the rule applied
and the fresh-variable counter before every transition so a run can be
replayed bit-for-bit and stepped backwards exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .canonical import CanonicalDef, CanonicalProgram
from .events import (
    DefMemo,
    DisjMemo,
    Event,
    MguBet,
    PlainAtom,
    PlainOther,
    Port,
    Tag,
    TaggedConj,
    TaggedDisj,
    initial_event,
    sel,
    subst_of,
)
from .terms import (
    Atom,
    Conj,
    Disj,
    FailGoal,
    Goal,
    Subst,
    TrueGoal,
    Unify,
    Var,
    mgu,
    vars_of,
)

DEFAULT_MAX_STEPS = 1_000_000


class EngineError(Exception):
    """An internal invariant was violated; always a bug, never user error."""


class FreshCounter:
    """Monotone source of fresh variable ids for clause renaming."""

    __slots__ = ("value",)

    def __init__(self, start: int):
        self.value = start

    def next(self) -> int:
        v = self.value
        self.value += 1
        return v


class _Final:
    def __repr__(self) -> str:
        return "Final"


class _Impossible:
    def __repr__(self) -> str:
        return "Impossible"


class _Underdetermined:
    def __repr__(self) -> str:
        return "Underdetermined"


FINAL = _Final()
IMPOSSIBLE = _Impossible()
UNDERDETERMINED = _Underdetermined()


@dataclass(frozen=True)
class Stepped:
    event: Event
    rule: str


StepResult = Union[Stepped, _Final, _Impossible]


def _rename_def(d: CanonicalDef, fresh: FreshCounter) -> tuple[tuple[Var, ...], Goal]:
    ordered = list(d.head_vars)
    head_set = set(d.head_vars)
    ordered.extend(v for v in vars_of(d.body) if v not in head_set)
    mapping = {v: Var(fresh.next(), v.name) for v in ordered}
    renaming = Subst(mapping)
    return tuple(mapping[v] for v in d.head_vars), renaming.apply(d.body)


# ---------------------------------------------------------------------------
# The transition rules
# ---------------------------------------------------------------------------

_C = Port.CALL
_E = Port.EXIT
_F = Port.FAIL
_R = Port.REDO


def _top(stack):
    return stack[0] if stack else None


@dataclass(frozen=True)
class Rule:
    name: str
    guard: Callable[[Event], bool]
    fire: Callable[[Event, CanonicalProgram, FreshCounter, bool], Event]


def _conj1(e, p, fresh, oc):
    g = e.goal
    return Event(_C, g.g1, (TaggedConj(Tag.FIRST, g.g1, g.g2),) + e.astack, e.bstack)


def _conj2(e, p, fresh, oc):
    a = e.astack[0]
    g2 = subst_of(e.bstack, a.g2)
    return Event(_C, g2, (TaggedConj(Tag.SECOND, a.g1, a.g2),) + e.astack[1:], e.bstack)


def _conj3(e, p, fresh, oc):
    a = e.astack[0]
    return Event(_F, Conj(a.g1, a.g2), e.astack[1:], e.bstack)


def _conj4(e, p, fresh, oc):
    a = e.astack[0]
    return Event(_E, Conj(a.g1, a.g2), e.astack[1:], e.bstack)


def _conj5(e, p, fresh, oc):
    a = e.astack[0]
    return Event(_R, a.g1, (TaggedConj(Tag.FIRST, a.g1, a.g2),) + e.astack[1:], e.bstack)


def _conj6(e, p, fresh, oc):
    g = e.goal
    return Event(_R, g.g2, (TaggedConj(Tag.SECOND, g.g1, g.g2),) + e.astack, e.bstack)


def _disj1(e, p, fresh, oc):
    g = e.goal
    return Event(_C, g.g1, (TaggedDisj(Tag.FIRST, g.g1, g.g2),) + e.astack, e.bstack)


def _disj2(e, p, fresh, oc):
    a = e.astack[0]
    return Event(_C, a.g2, (TaggedDisj(Tag.SECOND, a.g1, a.g2),) + e.astack[1:], e.bstack)


def _disj3(e, p, fresh, oc):
    a = e.astack[0]
    return Event(_F, Disj(a.g1, a.g2), e.astack[1:], e.bstack)


def _disj4(e, p, fresh, oc):
    a = e.astack[0]
    memo = DisjMemo(a.g1, Tag.FIRST, a.g1, a.g2)
    return Event(_E, Disj(a.g1, a.g2), e.astack[1:], (memo,) + e.bstack)


def _disj5(e, p, fresh, oc):
    a = e.astack[0]
    memo = DisjMemo(a.g2, Tag.SECOND, a.g1, a.g2)
    return Event(_E, Disj(a.g1, a.g2), e.astack[1:], (memo,) + e.bstack)


def _disj6(e, p, fresh, oc):
    memo = e.bstack[0]
    anc = TaggedDisj(memo.tag, memo.g1, memo.g2)
    return Event(_R, memo.chosen, (anc,) + e.astack, e.bstack[1:])


def _true1(e, p, fresh, oc):
    return Event(_E, e.goal, e.astack, e.bstack)


def _true2(e, p, fresh, oc):
    return Event(_F, e.goal, e.astack, e.bstack)


def _fail_rule(e, p, fresh, oc):
    return Event(_F, e.goal, e.astack, e.bstack)


def _unif1(e, p, fresh, oc):
    g = e.goal
    sigma = mgu(g.lhs, g.rhs, occurs_check=oc)
    if sigma is None:
        return Event(_F, g, e.astack, e.bstack)
    return Event(_E, g, e.astack, (MguBet(sigma),) + e.bstack)


def _unif2(e, p, fresh, oc):
    return Event(_F, e.goal, e.astack, e.bstack[1:])


def _atom1(e, p, fresh, oc):
    a = e.goal
    d = p.defs.get(a.indicator)
    if d is None:
        return Event(_F, a, e.astack, e.bstack)
    head_vars, body = _rename_def(d, fresh)
    # binds only the freshly renamed head variables, so sigma(a) = a
    sigma = Subst(dict(zip(head_vars, a.args)))
    return Event(_C, sigma.apply(body), (PlainAtom(a),) + e.astack, e.bstack)


def _atom2(e, p, fresh, oc):
    a = e.astack[0].atom
    return Event(_E, a, e.astack[1:], (DefMemo(e.goal, a),) + e.bstack)


def _atom3(e, p, fresh, oc):
    return Event(_F, e.astack[0].atom, e.astack[1:], e.bstack)


def _atom4(e, p, fresh, oc):
    memo = e.bstack[0]
    return Event(_R, memo.body, (PlainAtom(memo.atom),) + e.astack, e.bstack[1:])


def _is_conj_anc(e, tag):
    a = _top(e.astack)
    return isinstance(a, TaggedConj) and a.tag is tag


def _is_disj_anc(e, tag):
    a = _top(e.astack)
    return isinstance(a, TaggedDisj) and a.tag is tag and e.goal == sel(a)


RULES: tuple[Rule, ...] = (
    Rule("conj:1", lambda e: e.port is _C and isinstance(e.goal, Conj), _conj1),
    Rule("conj:2", lambda e: e.port is _E and _is_conj_anc(e, Tag.FIRST), _conj2),
    Rule("conj:3", lambda e: e.port is _F and _is_conj_anc(e, Tag.FIRST), _conj3),
    Rule("conj:4", lambda e: e.port is _E and _is_conj_anc(e, Tag.SECOND), _conj4),
    Rule("conj:5", lambda e: e.port is _F and _is_conj_anc(e, Tag.SECOND), _conj5),
    Rule("conj:6", lambda e: e.port is _R and isinstance(e.goal, Conj), _conj6),
    Rule("disj:1", lambda e: e.port is _C and isinstance(e.goal, Disj), _disj1),
    Rule("disj:2", lambda e: e.port is _F and _is_disj_anc(e, Tag.FIRST), _disj2),
    Rule("disj:3", lambda e: e.port is _F and _is_disj_anc(e, Tag.SECOND), _disj3),
    Rule("disj:4", lambda e: e.port is _E and _is_disj_anc(e, Tag.FIRST), _disj4),
    Rule("disj:5", lambda e: e.port is _E and _is_disj_anc(e, Tag.SECOND), _disj5),
    Rule(
        "disj:6",
        lambda e: e.port is _R
        and isinstance(e.goal, Disj)
        and isinstance(_top(e.bstack), DisjMemo),
        _disj6,
    ),
    Rule("true:1", lambda e: e.port is _C and isinstance(e.goal, TrueGoal), _true1),
    Rule("true:2", lambda e: e.port is _R and isinstance(e.goal, TrueGoal), _true2),
    Rule("fail", lambda e: e.port is _C and isinstance(e.goal, FailGoal), _fail_rule),
    Rule("unif:1", lambda e: e.port is _C and isinstance(e.goal, Unify), _unif1),
    Rule(
        "unif:2",
        lambda e: e.port is _R
        and isinstance(e.goal, Unify)
        and isinstance(_top(e.bstack), MguBet),
        _unif2,
    ),
    Rule("atom:1", lambda e: e.port is _C and isinstance(e.goal, Atom), _atom1),
    Rule("atom:2", lambda e: e.port is _E and isinstance(_top(e.astack), PlainAtom), _atom2),
    Rule("atom:3", lambda e: e.port is _F and isinstance(_top(e.astack), PlainAtom), _atom3),
    Rule(
        "atom:4",
        lambda e: e.port is _R
        and isinstance(e.goal, Atom)
        and isinstance(_top(e.bstack), DefMemo),
        _atom4,
    ),
)


def matching_rule_names(event: Event) -> list[str]:
    """Names of every rule whose guard accepts the event (audit hook)."""
    return [r.name for r in RULES if r.guard(event)]


def step_forward(
    event: Event,
    program: CanonicalProgram,
    fresh: FreshCounter | None = None,
    occurs_check: bool = True,
) -> StepResult:
    """One transition.  Final on a pop with empty A-stack, Impossible when
    no rule matches, otherwise the unique successor with the rule name."""
    if event.port in (_E, _F) and not event.astack:
        return FINAL
    matched = [r for r in RULES if r.guard(event)]
    if not matched:
        return IMPOSSIBLE
    if len(matched) > 1:
        raise EngineError(
            f"overlapping rules {[r.name for r in matched]} on {event!r}"
        )
    if fresh is None:
        fresh = FreshCounter(max(program.max_var_id(), _event_max_id(event)) + 1)
    rule = matched[0]
    return Stepped(rule.fire(event, program, fresh, occurs_check), rule.name)


def _event_max_id(event: Event) -> int:
    top = -1
    for v in vars_of(event.goal):
        top = max(top, v.id)
    for anc in event.astack:
        parts = (anc.atom,) if isinstance(anc, PlainAtom) else (
            (anc.goal,) if isinstance(anc, PlainOther) else (anc.g1, anc.g2)
        )
        for part in parts:
            for v in vars_of(part):
                top = max(top, v.id)
    for bet in event.bstack:
        if isinstance(bet, MguBet):
            for v, t in bet.subst.items():
                top = max(top, v.id, *(x.id for x in vars_of(t)), -1)
        elif isinstance(bet, DefMemo):
            for part in (bet.body, bet.atom):
                for v in vars_of(part):
                    top = max(top, v.id)
        else:
            for part in (bet.chosen, bet.g1, bet.g2):
                for v in vars_of(part):
                    top = max(top, v.id)
    return top


# ---------------------------------------------------------------------------
# Journals and drivers
# ---------------------------------------------------------------------------

RESUME = "resume"  # synthetic top-level redo between enumerated answers


@dataclass(frozen=True)
class JournalEntry:
    event: Event
    rule: str | None  # None for the initial event, RESUME for resumptions
    fresh_before: int


@dataclass
class Journal:
    program: CanonicalProgram
    entries: list[JournalEntry] = field(default_factory=list)
    final_counter: int = 0
    occurs_check: bool = True
    complete: bool = False  # last event is a pop with empty A-stack

    @property
    def events(self) -> list[Event]:
        return [en.event for en in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def counter_at(self, i: int) -> int:
        """Fresh-counter value while the engine sat at event i."""
        if i + 1 < len(self.entries):
            return self.entries[i + 1].fresh_before
        return self.final_counter


def step_backward_journal(journal: Journal, i: int) -> Event:
    """The exact predecessor of event i, from the recorded history."""
    if not 0 < i < len(journal.entries):
        raise IndexError(f"event {i} has no predecessor in a journal of length {len(journal)}")
    return journal.entries[i - 1].event


def replay_check(journal: Journal) -> None:
    """Re-derive every transition and demand bit-for-bit equality."""
    for i in range(1, len(journal.entries)):
        prev = journal.entries[i - 1].event
        entry = journal.entries[i]
        if entry.rule == RESUME:
            ok = (
                entry.event.port is _R
                and entry.event.astack == ()
                and entry.event.goal == prev.goal
                and entry.event.bstack == prev.bstack
            )
            if not ok:
                raise EngineError(f"corrupt resumption at index {i}")
            continue
        got = step_forward(
            prev,
            journal.program,
            FreshCounter(entry.fresh_before),
            journal.occurs_check,
        )
        if not isinstance(got, Stepped) or got.event != entry.event or got.rule != entry.rule:
            raise EngineError(f"replay diverged at index {i}: {got!r}")


def _base_fresh(program: CanonicalProgram, query: Goal) -> int:
    top = program.max_var_id()
    for v in vars_of(query):
        top = max(top, v.id)
    return top + 1


@dataclass
class RunResult:
    journal: Journal
    outcome: str  # "success" | "failure" | "budget"

    @property
    def final_event(self) -> Event:
        return self.journal.entries[-1].event


def run(
    query: Goal,
    program: CanonicalProgram,
    max_steps: int = DEFAULT_MAX_STEPS,
    occurs_check: bool = True,
    start_counter: int | None = None,
) -> RunResult:
    """Drive a query to its final event (or the step budget)."""
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    fresh = FreshCounter(
        start_counter if start_counter is not None else _base_fresh(program, query)
    )
    journal = Journal(program, occurs_check=occurs_check)
    event = initial_event(query)
    journal.entries.append(JournalEntry(event, None, fresh.value))
    outcome = "budget"
    for _ in range(max_steps):
        before = fresh.value
        result = step_forward(event, program, fresh, occurs_check)
        if result is FINAL:
            journal.complete = True
            if event.port is _E:
                outcome = "success"
            else:
                outcome = "failure"
                if event.bstack:
                    raise EngineError("failed derivation ended with a non-empty B-stack")
            break
        if result is IMPOSSIBLE:
            raise EngineError(f"journal event has no successor: {event!r}")
        journal.entries.append(JournalEntry(result.event, result.rule, before))
        event = result.event
    journal.final_counter = fresh.value
    return RunResult(journal, outcome)


def computed_answer(query: Goal, final_bstack) -> Subst:
    """Current substitution of the final exit's B-stack, on the query's vars."""
    from .events import current_subst

    return current_subst(final_bstack).restrict(vars_of(query))


@dataclass
class EnumResult:
    answers: list[Subst]
    journal: Journal
    outcome: str  # "failure" (search exhausted) | "budget"


def enumerate_answers(
    query: Goal,
    program: CanonicalProgram,
    max_steps: int = DEFAULT_MAX_STEPS,
    occurs_check: bool = True,
) -> EnumResult:
    """All answers in order, restarting each top-level exit with a synthetic
    redo of the query against the final B-stack."""
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    fresh = FreshCounter(_base_fresh(program, query))
    journal = Journal(program, occurs_check=occurs_check)
    event = initial_event(query)
    journal.entries.append(JournalEntry(event, None, fresh.value))
    answers: list[Subst] = []
    outcome = "budget"
    steps = 0
    while steps < max_steps:
        before = fresh.value
        result = step_forward(event, program, fresh, occurs_check)
        if result is FINAL:
            journal.complete = True
            if event.port is _F:
                outcome = "failure"
                if event.bstack:
                    raise EngineError("failed derivation ended with a non-empty B-stack")
                break
            answers.append(computed_answer(query, event.bstack))
            event = Event(_R, event.goal, (), event.bstack)
            journal.entries.append(JournalEntry(event, RESUME, fresh.value))
            journal.complete = False
            continue
        if result is IMPOSSIBLE:
            raise EngineError(f"journal event has no successor: {event!r}")
        journal.entries.append(JournalEntry(result.event, result.rule, before))
        event = result.event
        steps += 1
    journal.final_counter = fresh.value
    return EnumResult(answers, journal, outcome)


# ---------------------------------------------------------------------------
# Inverse stepping
# ---------------------------------------------------------------------------


class _StackMismatch(Exception):
    pass


def _exited_goal(raw: Goal, bstack) -> tuple[Goal | None, tuple]:
    """Reconstruct the goal of the exit event a component just popped from,
    plus the B-stack as it stood when the component was called.

    The B-stack records every exit: a unification leaves its mgu, an atom
    its definition memo, a disjunction its disjunct memo, and a conjunction
    the records of both conjuncts.  Atom and disjunction exits are read off
    their memos exactly.  A conjunction's exit goal is the called instance
    on its first exit but the raw pair on exits reached through a redo
    descent (lazy binding); when the two coincide the answer is exact,
    otherwise it is None (not locally determined).
    """
    if isinstance(raw, TrueGoal):
        return raw, bstack
    if isinstance(raw, Unify):
        # a redone unification never exits again, so this is a first exit
        if not (bstack and isinstance(bstack[0], MguBet)):
            raise _StackMismatch
        below = bstack[1:]
        return subst_of(below, raw), below
    if isinstance(raw, Atom):
        if not (bstack and isinstance(bstack[0], DefMemo)):
            raise _StackMismatch
        memo = bstack[0]
        _, below = _exited_goal(memo.body, bstack[1:])
        return memo.atom, below
    if isinstance(raw, Disj):
        if not (bstack and isinstance(bstack[0], DisjMemo)):
            raise _StackMismatch
        memo = bstack[0]
        _, below = _exited_goal(memo.chosen, bstack[1:])
        return Disj(memo.g1, memo.g2), below
    if isinstance(raw, Conj):
        _, mid = _exited_goal(raw.g2, bstack)
        _, below = _exited_goal(raw.g1, mid)
        inst = subst_of(below, raw)
        return (inst if inst == raw else None), below
    raise _StackMismatch  # FailGoal cannot exit


def _first_conjunct_exit_goal(g1: Goal, bstack) -> Goal | None:
    """The goal of the exit event the first conjunct just popped from.

    That exit's own bet is still on top of the B-stack: atoms exit as their
    memoized instance, disjunctions as their memoized pair.  Unifications
    and true only exit on a first descent, and a conjunction's redo entry
    and re-exit both equal the ancestor slot, so those come back verbatim.
    """
    if isinstance(g1, Atom):
        if bstack and isinstance(bstack[0], DefMemo):
            return bstack[0].atom
        return None
    if isinstance(g1, Disj):
        if bstack and isinstance(bstack[0], DisjMemo):
            return Disj(bstack[0].g1, bstack[0].g2)
        return None
    if isinstance(g1, (TrueGoal, Unify, Conj)):
        return g1
    return None  # fail never exits


def _failed_goal(
    raw: Goal, bstack, occurs_check: bool, substituted_entry: bool
) -> Goal | None:
    """The goal of the fail event a conjunct's region just popped from.

    Atoms always fail as the instance recorded at call time, disjunctions as
    their memoized instance pair, true as itself.  A unification fails as
    the called instance when that instance has no unifier (first descent)
    and as the raw goal otherwise (a redo descent; a unifiable instance must
    first have exited).  A conjunction-shaped region mirrors its entry: the
    raw slot for a first conjunct, but for a second conjunct (whose first
    entry was substituted) only determined when instance and raw coincide.
    """
    inst = subst_of(bstack, raw)
    if isinstance(raw, (TrueGoal, FailGoal, Atom, Disj)):
        return inst
    if isinstance(raw, Unify):
        inst_sigma = mgu(inst.lhs, inst.rhs, occurs_check=occurs_check)
        return inst if inst_sigma is None else raw
    if isinstance(raw, Conj):
        if not substituted_entry:
            return raw
        return raw if inst == raw else None
    return None


def _redo_source_goal(astack, called: Goal) -> Goal:
    """The raw goal of the redo event that preceded a push into `astack`.

    A redo's goal comes from its parent: the tagged component for
    conjunction/disjunction parents, and the instance recorded at call time
    (`called`) when the parent is an atom or the stack is empty (the
    synthetic top-level resumption).
    """
    top = _top(astack)
    if isinstance(top, TaggedConj):
        return top.g1 if top.tag is Tag.FIRST else top.g2
    if isinstance(top, TaggedDisj):
        return sel(top)
    return called


def step_backward_inverse(
    event: Event,
    program: CanonicalProgram,
    occurs_check: bool = True,
) -> Event | _Underdetermined:
    """The unique legal predecessor, computed from the event alone.

    Total on journal-legal events except where the event does not carry
    enough to rebuild the predecessor: the failure of a defined atom (the
    failed body's fresh renaming is gone), and pops of conjunction-shaped
    components whose called instance differs from their raw form (a redo
    descent shows the raw pair, a first descent the instance, and nothing
    local distinguishes the rounds).  Callers fall back to the journal.
    """
    port, goal, astack, bstack = event.port, event.goal, event.astack, event.bstack
    try:
        if port is _C:
            top = _top(astack)
            if top is None:
                if not bstack:
                    raise ValueError("an initial event has no predecessor")
                return UNDERDETERMINED
            rest = astack[1:]
            if isinstance(top, TaggedConj):
                if top.tag is Tag.FIRST:
                    return Event(_C, Conj(top.g1, top.g2), rest, bstack)
                pred_anc = TaggedConj(Tag.FIRST, top.g1, top.g2)
                g1_exit = _first_conjunct_exit_goal(top.g1, bstack)
                if g1_exit is None:
                    return UNDERDETERMINED
                return Event(_E, g1_exit, (pred_anc,) + rest, bstack)
            if isinstance(top, TaggedDisj):
                if top.tag is Tag.FIRST:
                    return Event(_C, Disj(top.g1, top.g2), rest, bstack)
                pred_anc = TaggedDisj(Tag.FIRST, top.g1, top.g2)
                return Event(_F, top.g1, (pred_anc,) + rest, bstack)
            if isinstance(top, PlainAtom):
                return Event(_C, top.atom, rest, bstack)
            return UNDERDETERMINED
        if port is _E:
            if isinstance(goal, TrueGoal):
                return Event(_C, goal, astack, bstack)
            if isinstance(goal, Unify):
                if not (bstack and isinstance(bstack[0], MguBet)):
                    return UNDERDETERMINED
                return Event(_C, goal, astack, bstack[1:])
            if isinstance(goal, Disj):
                if not (bstack and isinstance(bstack[0], DisjMemo)):
                    return UNDERDETERMINED
                memo = bstack[0]
                anc = TaggedDisj(memo.tag, memo.g1, memo.g2)
                return Event(_E, memo.chosen, (anc,) + astack, bstack[1:])
            if isinstance(goal, Conj):
                g2_exit, _ = _exited_goal(goal.g2, bstack)
                if g2_exit is None:
                    return UNDERDETERMINED
                anc = TaggedConj(Tag.SECOND, goal.g1, goal.g2)
                return Event(_E, g2_exit, (anc,) + astack, bstack)
            if isinstance(goal, Atom):
                if not (bstack and isinstance(bstack[0], DefMemo)):
                    return UNDERDETERMINED
                memo = bstack[0]
                return Event(_E, memo.body, (PlainAtom(goal),) + astack, bstack[1:])
            return UNDERDETERMINED  # exit fail cannot be entered
        if port is _F:
            if isinstance(goal, TrueGoal):
                return Event(_R, goal, astack, bstack)
            if isinstance(goal, FailGoal):
                return Event(_C, goal, astack, bstack)
            if isinstance(goal, Unify):
                # redo-descended goals are raw (lazy binding); the recorded
                # mgu was computed from the instance as called, which the
                # current substitution reconstructs
                inst = subst_of(bstack, goal)
                sigma = mgu(inst.lhs, inst.rhs, occurs_check=occurs_check)
                if sigma is None:
                    return Event(_C, goal, astack, bstack)
                return Event(_R, goal, astack, (MguBet(sigma),) + bstack)
            if isinstance(goal, Conj):
                anc = TaggedConj(Tag.FIRST, goal.g1, goal.g2)
                failed = _failed_goal(goal.g1, bstack, occurs_check, substituted_entry=False)
                if failed is None:
                    return UNDERDETERMINED
                return Event(_F, failed, (anc,) + astack, bstack)
            if isinstance(goal, Disj):
                anc = TaggedDisj(Tag.SECOND, goal.g1, goal.g2)
                return Event(_F, goal.g2, (anc,) + astack, bstack)
            if isinstance(goal, Atom):
                if goal.indicator not in program.defs:
                    return Event(_C, goal, astack, bstack)
                # the failed body instance used a fresh renaming the event
                # does not record
                return UNDERDETERMINED
            return UNDERDETERMINED
        # port is REDO
        top = _top(astack)
        if top is None:
            return UNDERDETERMINED  # synthetic resumption has no rule predecessor
        rest = astack[1:]
        if isinstance(top, TaggedConj):
            if top.tag is Tag.FIRST:
                anc = TaggedConj(Tag.SECOND, top.g1, top.g2)
                failed = _failed_goal(top.g2, bstack, occurs_check, substituted_entry=True)
                if failed is None:
                    return UNDERDETERMINED
                return Event(_F, failed, (anc,) + rest, bstack)
            return Event(_R, Conj(top.g1, top.g2), rest, bstack)
        if isinstance(top, TaggedDisj):
            memo = DisjMemo(goal, top.tag, top.g1, top.g2)
            src = _redo_source_goal(rest, Disj(top.g1, top.g2))
            return Event(_R, src, rest, (memo,) + bstack)
        if isinstance(top, PlainAtom):
            memo = DefMemo(goal, top.atom)
            src = _redo_source_goal(rest, top.atom)
            return Event(_R, src, rest, (memo,) + bstack)
        return UNDERDETERMINED
    except _StackMismatch:
        return UNDERDETERMINED


# ---------------------------------------------------------------------------
# Loading helpers
# ---------------------------------------------------------------------------


def prepare(
    program_text: str, query_text: str, assume_canonical: bool = False
) -> tuple[CanonicalProgram, Goal]:
    """Parse and load a program plus a query with non-colliding variable ids."""
    from .canonical import canonicalize, load_canonical
    from .reader import parse_program, parse_query

    source = parse_program(program_text)
    cp = load_canonical(source) if assume_canonical else canonicalize(source)
    query = parse_query(query_text, start_id=cp.max_var_id() + 1)
    return cp, query
