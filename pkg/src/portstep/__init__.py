"""portstep: a four-port stepping engine for pure Prolog.

Execution states are events (port, goal, ancestor stack, bet stack); a small
set of deterministic transition rules drives them forward, journals make
backward stepping exact, and an independent SLD oracle backs differential
testing.  A CLI, a socket debug service and a browser step-debugger sit on
top.
"""

from .canonical import (
    CanonicalDef,
    CanonicalProgram,
    canonicalize,
    dump_canonical,
    load_canonical,
)
from .engine import (
    DEFAULT_MAX_STEPS,
    FINAL,
    IMPOSSIBLE,
    UNDERDETERMINED,
    EngineError,
    EnumResult,
    FreshCounter,
    Journal,
    JournalEntry,
    RESUME,
    RunResult,
    Stepped,
    computed_answer,
    enumerate_answers,
    matching_rule_names,
    prepare,
    replay_check,
    run,
    step_backward_inverse,
    step_backward_journal,
    step_forward,
)
from .events import (
    Ancestor,
    Bet,
    DefMemo,
    DisjMemo,
    Event,
    EventClass,
    MguBet,
    PlainAtom,
    PlainOther,
    Port,
    Tag,
    TaggedConj,
    TaggedDisj,
    classify_event,
    current_subst,
    initial_event,
    is_pop,
    is_push,
    sel,
    subst_of,
)
from .oracle import DEPTH_EXCEEDED, GenConfig, generate_program, sld_solve
from .reader import (
    Clause,
    PrologSyntaxError,
    SourceProgram,
    format_clause,
    format_goal,
    format_program,
    format_term,
    parse_program,
    parse_query,
)
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
    Subst,
    TRUE,
    Term,
    TrueGoal,
    Unify,
    Var,
    alpha_equivalent,
    goal_to_term,
    mgu,
    term_to_goal,
    vars_of,
)
from .tracer import TraceLine, render_pretty, render_raw, render_structured, render_text

__version__ = "0.1.0"
