"""Inverse stepping: reconstructing predecessors from events alone."""

import pytest

from conftest import GOOD_BAD, POST_PAIR, TWO_CLAUSE_Q
from portstep import (
    Atom,
    Const,
    Disj,
    DisjMemo,
    Event,
    FreshCounter,
    Int,
    MguBet,
    Port,
    RESUME,
    Stepped,
    Subst,
    Tag,
    TaggedDisj,
    UNDERDETERMINED,
    Unify,
    Var,
    enumerate_answers,
    prepare,
    run,
    step_backward_inverse,
    step_forward,
)

X = Var(0, "X")
Y = Var(1, "Y")


def test_failed_unification_with_unifier_comes_from_redo():
    cp, _ = prepare("", "true")
    goal = Unify(X, Int(2))
    e = Event(Port.FAIL, goal, (), ())
    pred = step_backward_inverse(e, cp)
    assert pred == Event(Port.REDO, goal, (), (MguBet(Subst({X: Int(2)})),))


def test_failed_unification_without_unifier_comes_from_call():
    cp, _ = prepare("", "true")
    goal = Unify(Const("a"), Const("b"))
    e = Event(Port.FAIL, goal, (), ())
    assert step_backward_inverse(e, cp) == Event(Port.CALL, goal, (), ())


def test_disjunction_exit_inverts_through_memo():
    cp, _ = prepare("", "true")
    g1, g2 = Atom(Const("g1")), Atom(Const("g2"))
    memo = DisjMemo(g1, Tag.FIRST, g1, g2)
    e = Event(Port.EXIT, Disj(g1, g2), (), (memo,))
    pred = step_backward_inverse(e, cp)
    assert pred == Event(Port.EXIT, g1, (TaggedDisj(Tag.FIRST, g1, g2),), ())


def test_failed_defined_atom_is_underdetermined():
    cp, _ = prepare("p :- fail.", "true")
    e = Event(Port.FAIL, Atom(Const("p")), (), ())
    assert step_backward_inverse(e, cp) is UNDERDETERMINED


def test_failed_undefined_atom_comes_from_call():
    cp, _ = prepare("", "true")
    e = Event(Port.FAIL, Atom(Const("p")), (), ())
    assert step_backward_inverse(e, cp) == Event(Port.CALL, Atom(Const("p")), (), ())


def test_initial_event_has_no_predecessor():
    cp, q = prepare("", "true")
    with pytest.raises(ValueError):
        step_backward_inverse(Event(Port.CALL, q, (), ()), cp)


def _journals():
    for text, query, canonical, enum in [
        (GOOD_BAD, "main", False, False),
        (POST_PAIR, "post(X,Y),fail", True, False),
        (POST_PAIR, "post(X,Y)", True, True),
        (TWO_CLAUSE_Q, "q(X,Y)", False, True),
        ("p(X) :- q(X), r(X).\nq(a).\nq(b).\nr(b).\n", "p(V)", False, True),
    ]:
        cp, q = prepare(text, query, canonical)
        result = enumerate_answers(q, cp) if enum else run(q, cp)
        yield result.journal


def test_inverse_matches_journal_predecessor_everywhere():
    from helpers import underdetermined_shape_ok

    underdetermined = 0
    for journal in _journals():
        for i in range(1, len(journal)):
            entry = journal.entries[i]
            if entry.rule == RESUME:
                continue
            pred = step_backward_inverse(entry.event, journal.program)
            if pred is UNDERDETERMINED:
                underdetermined += 1
                assert underdetermined_shape_ok(entry.event, journal.program)
                continue
            assert pred == journal.events[i - 1], (i, entry.event)
    assert underdetermined > 0


def test_inverse_then_forward_is_identity():
    for journal in _journals():
        for i in range(1, len(journal)):
            entry = journal.entries[i]
            if entry.rule == RESUME:
                continue
            pred = step_backward_inverse(entry.event, journal.program)
            if pred is UNDERDETERMINED:
                continue
            redone = step_forward(
                pred, journal.program, FreshCounter(entry.fresh_before)
            )
            assert isinstance(redone, Stepped)
            assert redone.event == entry.event
            assert redone.rule == entry.rule


def test_synthetic_resumption_is_underdetermined():
    cp, q = prepare(POST_PAIR, "post(X,Y)", assume_canonical=True)
    journal = enumerate_answers(q, cp).journal
    resumes = [en for en in journal.entries if en.rule == RESUME]
    assert resumes
    for en in resumes:
        assert step_backward_inverse(en.event, cp) is UNDERDETERMINED
