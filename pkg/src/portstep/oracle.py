"""Reference semantics and a random program generator for differential tests.

sld_solve is classical SLD resolution: leftmost selection, depth-first
search, clauses in textual order.  It shares unification with the engine but
runs its own goal-agenda loop, so the two semantics are independent above
the unifier.  generate_program produces small pure programs (atoms, =,
conjunction, disjunction, true, fail) deterministically per seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .canonical import CanonicalProgram
from .reader import Clause, SourceProgram
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
    mgu,
    vars_of,
)


class _DepthExceeded:
    def __repr__(self) -> str:
        return "DepthExceeded"


DEPTH_EXCEEDED = _DepthExceeded()

DEFAULT_ORACLE_BUDGET = 20_000


def _as_clauses(program: SourceProgram | CanonicalProgram) -> list[Clause]:
    if isinstance(program, CanonicalProgram):
        return program.to_source().clauses
    return program.clauses


def _term_size(t) -> int:
    size = 0
    stack = [t]
    while stack:
        x = stack.pop()
        size += 1
        if isinstance(x, Compound):
            stack.extend(x.args)
    return size


def sld_solve(
    query: Goal,
    program: SourceProgram | CanonicalProgram,
    max_depth: int = DEFAULT_ORACLE_BUDGET,
    occurs_check: bool = True,
) -> list[Subst] | _DepthExceeded:
    """Answers in standard Prolog order, restricted to the query's variables.

    max_depth bounds the total work: goal reductions plus the size of the
    bindings they create.  When it runs out the whole result is
    DEPTH_EXCEEDED, since any further answers are unknown.
    """
    clauses = _as_clauses(program)
    index: dict[tuple[str, int], list[Clause]] = {}
    top_id = -1
    for c in clauses:
        index.setdefault(c.head.indicator, []).append(c)
        for v in vars_of(c.head):
            top_id = max(top_id, v.id)
        if c.body is not None:
            for v in vars_of(c.body):
                top_id = max(top_id, v.id)
    qvars = vars_of(query)
    for v in qvars:
        top_id = max(top_id, v.id)
    next_id = top_id + 1

    def rename_clause(c: Clause) -> tuple[Term, Goal]:
        nonlocal next_id
        cvars = list(vars_of(c.head))
        body = c.body if c.body is not None else TRUE
        seen = set(cvars)
        cvars.extend(v for v in vars_of(body) if v not in seen)
        mapping = {}
        for v in cvars:
            mapping[v] = Var(next_id, v.name)
            next_id += 1
        ren = Subst(mapping)
        return ren.apply(c.head.pred), ren.apply(body)

    answers: list[Subst] = []
    # agenda of (goal list, accumulated substitution); explicit stack keeps
    # Prolog's depth-first order without Python recursion limits
    agenda: list[tuple[tuple[Goal, ...], Subst]] = [((query,), Subst())]
    budget = max_depth
    while agenda:
        budget -= 1
        if budget < 0:
            return DEPTH_EXCEEDED
        goals, theta = agenda.pop()
        if not goals:
            answers.append(theta.restrict(qvars))
            continue
        g, rest = goals[0], goals[1:]
        if isinstance(g, TrueGoal):
            agenda.append((rest, theta))
        elif isinstance(g, FailGoal):
            continue
        elif isinstance(g, Conj):
            agenda.append(((g.g1, g.g2) + rest, theta))
        elif isinstance(g, Disj):
            agenda.append(((g.g2,) + rest, theta))
            agenda.append(((g.g1,) + rest, theta))
        elif isinstance(g, Unify):
            sigma = mgu(theta.apply(g.lhs), theta.apply(g.rhs), occurs_check)
            if sigma is not None:
                budget -= sum(_term_size(t) for _, t in sigma.items())
                agenda.append((rest, theta.compose(sigma)))
        elif isinstance(g, Atom):
            goal_term = theta.apply(g.pred)
            alternatives = []
            for c in index.get(g.indicator, ()):
                head, body = rename_clause(c)
                sigma = mgu(goal_term, head, occurs_check)
                if sigma is not None:
                    budget -= sum(_term_size(t) for _, t in sigma.items())
                    alternatives.append(((body,) + rest, theta.compose(sigma)))
            agenda.extend(reversed(alternatives))
        else:
            raise TypeError(f"not a goal: {g!r}")
    return answers


# ---------------------------------------------------------------------------
# Random pure programs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenConfig:
    max_predicates: int = 4
    max_clauses_per_pred: int = 3
    max_body_len: int = 4
    max_term_depth: int = 2
    variable_pool_size: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        for name in (
            "max_predicates",
            "max_clauses_per_pred",
            "max_body_len",
            "max_term_depth",
            "variable_pool_size",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


_CONST_NAMES = ("a", "b", "c")
_FUNCTORS = ("f", "g")


class _Gen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.next_id = 0
        n = self.rng.randint(1, cfg.max_predicates)
        self.preds = [(f"p{i}", self.rng.randint(0, 2)) for i in range(n)]

    def fresh_pool(self) -> list[Var]:
        pool = []
        for i in range(self.cfg.variable_pool_size):
            pool.append(Var(self.next_id, f"V{i}"))
            self.next_id += 1
        return pool

    def term(self, pool: list[Var], depth: int) -> Term:
        roll = self.rng.random()
        if roll < 0.45:
            return self.rng.choice(pool)
        if roll < 0.75:
            return Const(self.rng.choice(_CONST_NAMES))
        if roll < 0.85 or depth <= 0:
            return Int(self.rng.randint(0, 3))
        functor = self.rng.choice(_FUNCTORS)
        arity = self.rng.randint(1, 2)
        return Compound(functor, tuple(self.term(pool, depth - 1) for _ in range(arity)))

    def atom(self, pool: list[Var], max_pred_index: int) -> Atom:
        # calls mostly point at earlier predicates; rare self-calls keep
        # recursion possible without making most programs loop
        roll = self.rng.random()
        if roll < 0.06:
            name, arity = "q_undefined", 1
        elif max_pred_index == 0:
            if roll < 0.88:
                name, arity = "q_undefined", 1  # nothing earlier to call
            else:
                name, arity = self.preds[0]
        elif roll < 0.96:
            name, arity = self.preds[self.rng.randrange(max_pred_index)]
        else:
            name, arity = self.preds[max_pred_index]
        if arity == 0:
            return Atom(Const(name))
        args = tuple(self.term(pool, self.cfg.max_term_depth) for _ in range(arity))
        return Atom(Compound(name, args))

    def leaf(self, pool: list[Var], pred_index: int) -> Goal:
        roll = self.rng.random()
        if roll < 0.30:
            return Unify(
                self.term(pool, self.cfg.max_term_depth),
                self.term(pool, self.cfg.max_term_depth),
            )
        if roll < 0.65:
            return self.atom(pool, pred_index)
        if roll < 0.85:
            return TRUE
        return FAIL

    def body(self, pool: list[Var], pred_index: int, size: int) -> Goal:
        if size <= 1:
            return self.leaf(pool, pred_index)
        split = self.rng.randint(1, size - 1)
        left = self.body(pool, pred_index, split)
        right = self.body(pool, pred_index, size - split)
        return Conj(left, right) if self.rng.random() < 0.65 else Disj(left, right)

    def clause(self, pred_index: int) -> Clause:
        name, arity = self.preds[pred_index]
        pool = self.fresh_pool()
        if arity == 0:
            head = Atom(Const(name))
        else:
            args = tuple(self.term(pool, 1) for _ in range(arity))
            head = Atom(Compound(name, args))
        if self.rng.random() < 0.25:
            return Clause(head, None)
        size = self.rng.randint(1, self.cfg.max_body_len)
        return Clause(head, self.body(pool, pred_index, size))

    def program(self) -> SourceProgram:
        clauses = []
        for i in range(len(self.preds)):
            for _ in range(self.rng.randint(1, self.cfg.max_clauses_per_pred)):
                clauses.append(self.clause(i))
        return SourceProgram(clauses)

    def query(self) -> Goal:
        pool = self.fresh_pool()
        size = self.rng.randint(1, self.cfg.max_body_len)
        return self.body(pool, len(self.preds) - 1, size)


def generate_program(cfg: GenConfig) -> tuple[SourceProgram, list[Goal]]:
    """A random pure program plus sample queries; identical per seed."""
    gen = _Gen(cfg)
    program = gen.program()
    queries = [gen.query() for _ in range(gen.rng.randint(1, 3))]
    return program, queries
