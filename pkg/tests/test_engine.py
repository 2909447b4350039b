"""Forward stepping, journals, drivers and the golden traces."""

import pytest

from conftest import GOLDEN, GOOD_BAD, POST_PAIR, TWO_CLAUSE_Q
from helpers import answers_match
from portstep import (
    Atom,
    Conj,
    Const,
    DefMemo,
    Disj,
    DisjMemo,
    Event,
    FAIL,
    FINAL,
    IMPOSSIBLE,
    Int,
    MguBet,
    PlainAtom,
    Port,
    Stepped,
    Subst,
    TRUE,
    Tag,
    TaggedConj,
    TaggedDisj,
    Unify,
    Var,
    computed_answer,
    enumerate_answers,
    initial_event,
    prepare,
    replay_check,
    run,
    sld_solve,
    step_backward_journal,
    step_forward,
    vars_of,
)
from portstep.tracer import render_raw, render_text


def _journal(program_text, query_text, assume_canonical=False, enumerate=False):
    cp, q = prepare(program_text, query_text, assume_canonical)
    if enumerate:
        return enumerate_answers(q, cp)
    return run(q, cp)


def test_initial_event_has_empty_stacks():
    q = Atom(Const("main"))
    assert initial_event(q) == Event(Port.CALL, q, (), ())


def test_golden_good_bad_main():
    result = _journal(GOOD_BAD, "main")
    assert result.outcome == "failure"
    assert len(result.journal) == 14
    rendered = render_text(render_raw(result.journal))
    assert rendered == (GOLDEN / "trace_good_bad_main.txt").read_text()
    assert result.final_event.bstack == ()
    replay_check(result.journal)


def test_golden_post_fail():
    result = _journal(POST_PAIR, "post(X,Y),fail", assume_canonical=True)
    assert result.outcome == "failure"
    assert len(result.journal) == 46
    assert result.final_event.bstack == ()
    replay_check(result.journal)


def test_conj_call_pushes_first_tag():
    result = _journal(GOOD_BAD, "main")
    events = result.journal.events
    e1, e2 = events[1], events[2]
    assert e1.port is Port.CALL and isinstance(e1.goal, Conj)
    assert e2.port is Port.CALL and e2.goal == Atom(Const("good"))
    assert isinstance(e2.astack[0], TaggedConj) and e2.astack[0].tag is Tag.FIRST


def test_exit_first_conjunct_calls_second_with_same_bets():
    result = _journal(GOOD_BAD, "main")
    events = result.journal.events
    e5, e6 = events[5], events[6]
    assert e5.port is Port.EXIT and e5.goal == Atom(Const("good"))
    assert e6.port is Port.CALL and e6.goal == Atom(Const("bad"))
    assert e6.bstack == e5.bstack
    assert isinstance(e6.bstack[0], DefMemo)


def test_rule_tags_of_good_bad_journal():
    result = _journal(GOOD_BAD, "main")
    rules = [en.rule for en in result.journal.entries]
    assert rules == [
        None,
        "atom:1",
        "conj:1",
        "atom:1",
        "true:1",
        "atom:2",
        "conj:2",
        "atom:1",
        "conj:5",
        "atom:4",
        "true:2",
        "atom:3",
        "conj:3",
        "atom:3",
    ]


def test_undefined_predicate_fails_in_place():
    result = _journal("", "nosuch(X)")
    assert result.outcome == "failure"
    assert len(result.journal) == 2
    assert result.journal.entries[1].rule == "atom:1"


def test_redo_disjunction_follows_memo():
    ya, yb = Unify(Var(0, "Y"), Const("a")), Unify(Var(0, "Y"), Const("b"))
    pair = Disj(ya, yb)
    memo = DisjMemo(ya, Tag.FIRST, ya, yb)
    e = Event(Port.REDO, pair, (), (memo, MguBet(Subst({Var(0, "Y"): Const("a")}))))
    cp, _ = prepare("", "true")
    stepped = step_forward(e, cp)
    assert isinstance(stepped, Stepped) and stepped.rule == "disj:6"
    assert stepped.event.port is Port.REDO and stepped.event.goal == ya
    assert stepped.event.astack[0] == TaggedDisj(Tag.FIRST, ya, yb)


def test_call_fail_is_context_free():
    cp, _ = prepare("", "true")
    anc = (PlainAtom(Atom(Const("p"))),)
    bets = (MguBet(Subst({Var(0, "X"): Int(1)})),)
    stepped = step_forward(Event(Port.CALL, FAIL, anc, bets), cp)
    assert isinstance(stepped, Stepped) and stepped.rule == "fail"
    assert stepped.event == Event(Port.FAIL, FAIL, anc, bets)


def test_redo_fail_is_impossible():
    cp, _ = prepare("", "true")
    assert step_forward(Event(Port.REDO, FAIL, (), ()), cp) is IMPOSSIBLE


def test_redo_atom_without_memo_is_impossible():
    cp, _ = prepare("p.", "true")
    e = Event(Port.REDO, Atom(Const("p")), (PlainAtom(Atom(Const("q"))),), ())
    assert step_forward(e, cp) is IMPOSSIBLE


def test_exit_mismatched_disjunct_is_impossible():
    ya, yb = Unify(Var(0, "Y"), Const("a")), Unify(Var(0, "Y"), Const("b"))
    cp, _ = prepare("", "true")
    e = Event(Port.EXIT, TRUE, (TaggedDisj(Tag.FIRST, ya, yb),), ())
    assert step_forward(e, cp) is IMPOSSIBLE


def test_pop_with_empty_astack_is_final():
    cp, _ = prepare("", "true")
    assert step_forward(Event(Port.EXIT, TRUE, (), ()), cp) is FINAL
    assert step_forward(Event(Port.FAIL, TRUE, (), ()), cp) is FINAL


def test_true_succeeds_in_one_transition():
    result = _journal("", "true")
    assert result.outcome == "success"
    assert len(result.journal) == 2


def test_budget_is_an_outcome_not_a_crash():
    cp, q = prepare("p :- p.", "p")
    result = run(q, cp, max_steps=50)
    assert result.outcome == "budget"
    assert len(result.journal) == 51


def test_enumerate_post_answers_in_order():
    cp, q = prepare(POST_PAIR, "post(X,Y)", assume_canonical=True)
    result = enumerate_answers(q, cp)
    assert result.outcome == "failure"
    x, y = vars_of(q)
    assert [(a.get(x), a.get(y)) for a in result.answers] == [
        (Int(1), Const("a")),
        (Int(1), Const("b")),
    ]
    replay_check(result.journal)


def test_enumerate_fail_has_no_answers():
    cp, q = prepare("", "fail")
    result = enumerate_answers(q, cp)
    assert result.answers == []
    assert result.outcome == "failure"


def test_enumerate_matches_oracle_on_example_program():
    source_text = TWO_CLAUSE_Q
    cp, q = prepare(source_text, "q(X,Y)")
    result = enumerate_answers(q, cp)
    from portstep import parse_program

    oracle = sld_solve(q, parse_program(source_text))
    assert answers_match(result.answers, oracle, vars_of(q))
    first = result.answers[0]
    x, y = vars_of(q)
    assert (first.get(x), first.get(y)) == (Const("a"), Const("b"))


def test_computed_answer_restricted_to_query_vars():
    cp, q = prepare(POST_PAIR, "post(X,Y)", assume_canonical=True)
    result = run(q, cp)
    assert result.outcome == "success"
    answer = computed_answer(q, result.final_event.bstack)
    x, y = vars_of(q)
    assert answer.get(x) == Int(1) and answer.get(y) == Const("a")
    assert set(answer.domain) <= {x, y}


def test_computed_answer_of_true_is_empty():
    cp, q = prepare("", "true")
    result = run(q, cp)
    assert len(computed_answer(q, result.final_event.bstack)) == 0


def test_step_backward_journal_returns_recorded_predecessor():
    result = _journal(GOOD_BAD, "main")
    journal = result.journal
    for i in range(1, len(journal)):
        assert step_backward_journal(journal, i) == journal.events[i - 1]
    with pytest.raises(IndexError):
        step_backward_journal(journal, 0)
    with pytest.raises(IndexError):
        step_backward_journal(journal, len(journal))


def test_replay_reproduces_journal_bit_for_bit():
    for text, query, canonical in [
        (GOOD_BAD, "main", False),
        (POST_PAIR, "post(X,Y),fail", True),
        (TWO_CLAUSE_Q, "q(X,Y)", False),
    ]:
        result = _journal(text, query, canonical)
        replay_check(result.journal)


def test_run_rejects_nonpositive_budget():
    cp, q = prepare("", "true")
    with pytest.raises(ValueError):
        run(q, cp, max_steps=0)


def test_occurs_check_flag_changes_cyclic_unification():
    from portstep import Compound

    cp, q = prepare("p(X) :- X = f(X).", "p(Y)")
    strict = run(q, cp, occurs_check=True)
    assert strict.outcome == "failure"
    loose = run(q, cp, occurs_check=False)
    assert loose.outcome == "success"
    (y,) = vars_of(q)
    answer = computed_answer(q, loose.final_event.bstack)
    bound = answer.get(y)
    assert isinstance(bound, Compound) and bound.functor == "f"
    assert isinstance(bound.args[0], Var)  # the cyclic clause variable, finite form
    replay_check(loose.journal)  # the flag is recorded, so replay agrees

    # unification at the top level binds the query variable itself
    cp2, q2 = prepare("", "X = f(X)")
    direct = run(q2, cp2, occurs_check=False)
    (x,) = vars_of(q2)
    assert computed_answer(q2, direct.final_event.bstack).get(x) == Compound("f", (x,))
