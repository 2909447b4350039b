"""Execution events: ports, ancestor stacks and bet stacks.

An event is a quadruple (port, goal, A-stack, B-stack).  The A-stack holds
generalized ancestors (the calling atom, or a tagged conjunction or
disjunction pair); the B-stack holds "bets": most general unifiers plus two
kinds of memos recording which definition or which disjunct was used to exit
a goal.  Stacks are tuples with the top at index 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import NamedTuple, Union

from .terms import Atom, FailGoal, Goal, Subst, TrueGoal, Unify


class Port(str, Enum):
    CALL = "call"
    EXIT = "exit"
    FAIL = "fail"
    REDO = "redo"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


class Tag(IntEnum):
    FIRST = 1
    SECOND = 2


@dataclass(frozen=True)
class PlainAtom:
    """Ancestor pushed when an atomary goal's definition is entered."""

    atom: Atom


@dataclass(frozen=True)
class TaggedConj:
    tag: Tag
    g1: Goal
    g2: Goal


@dataclass(frozen=True)
class TaggedDisj:
    tag: Tag
    g1: Goal
    g2: Goal


@dataclass(frozen=True)
class PlainOther:
    """Grammar-admitted true/fail/unification ancestor; no rule pushes one."""

    goal: Union[TrueGoal, FailGoal, Unify]


Ancestor = Union[PlainAtom, TaggedConj, TaggedDisj, PlainOther]


@dataclass(frozen=True)
class MguBet:
    subst: Subst


@dataclass(frozen=True)
class DefMemo:
    """The body instance through which an atom exited, fixed at call time."""

    body: Goal
    atom: Atom


@dataclass(frozen=True)
class DisjMemo:
    """The disjunct through which a disjunction exited, with its tag."""

    chosen: Goal
    tag: Tag
    g1: Goal
    g2: Goal


Bet = Union[MguBet, DefMemo, DisjMemo]

AStack = tuple[Ancestor, ...]
BStack = tuple[Bet, ...]


@dataclass(frozen=True)
class Event:
    port: Port
    goal: Goal
    astack: AStack
    bstack: BStack


def initial_event(query: Goal) -> Event:
    """The event a query starts from: call with both stacks empty."""
    return Event(Port.CALL, query, (), ())


def subst_of(bstack: BStack, x):
    """Current substitution of a B-stack applied to a term or goal.

    Defined by folding over the stack: the empty stack is the identity, an
    mgu on top is applied after the rest of the stack, memos are skipped.
    """
    for bet in reversed(bstack):
        if isinstance(bet, MguBet):
            x = bet.subst.apply(x)
    return x


def current_subst(bstack: BStack) -> Subst:
    """The fold of subst_of materialized as one composed substitution."""
    acc = Subst()
    for bet in reversed(bstack):
        if isinstance(bet, MguBet):
            acc = acc.compose(bet.subst)
    return acc


def sel(ancestor: Ancestor) -> Goal:
    """The tag-selected component of a tagged ancestor."""
    if isinstance(ancestor, (TaggedConj, TaggedDisj)):
        return ancestor.g1 if ancestor.tag is Tag.FIRST else ancestor.g2
    raise ValueError(f"untagged ancestor has no selected component: {ancestor!r}")


def is_push(e: Event) -> bool:
    return e.port in (Port.CALL, Port.REDO)


def is_pop(e: Event) -> bool:
    return e.port in (Port.EXIT, Port.FAIL)


class EventClass(NamedTuple):
    kind: str  # "push" | "pop"
    position: str  # "initial" | "final-candidate" | "interior"


def classify_event(e: Event) -> EventClass:
    """Push/pop and initial/final-candidate/interior classification."""
    kind = "push" if is_push(e) else "pop"
    if e.port is Port.CALL and not e.astack and not e.bstack:
        position = "initial"
    elif kind == "pop" and not e.astack:
        position = "final-candidate"
    else:
        position = "interior"
    return EventClass(kind, position)
