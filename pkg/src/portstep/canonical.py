"""Single-clause canonical form of a program.

Every predicate becomes one definition `p(X1,..,Xn) :- B1; B2; ...` where
each Bi is the right-nested conjunction `X1=t1, ..., Xn=tn, Body` built from
one source clause (facts contribute `true` as the body).  The head variables
are fresh, shared across the disjuncts, and occur in the body only as the
left-hand sides of the argument equalities.

A predicate already in that shape is adopted verbatim, which makes the
transformation idempotent.  Programs written directly in single-clause style
(one clause per predicate, pairwise-distinct variable head arguments, no
equality prefix) can instead be loaded untransformed with load_canonical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .reader import Clause, SourceProgram, format_goal, format_term
from .terms import (
    Atom,
    Compound,
    Conj,
    Const,
    Disj,
    Goal,
    TRUE,
    Term,
    Unify,
    Var,
    vars_of,
)

_HEAD_NAMES = ("X", "Y", "Z")


@dataclass(frozen=True)
class CanonicalDef:
    head_vars: tuple[Var, ...]
    body: Goal


@dataclass
class CanonicalProgram:
    defs: dict[tuple[str, int], CanonicalDef]

    def max_var_id(self) -> int:
        top = -1
        for d in self.defs.values():
            for v in d.head_vars:
                top = max(top, v.id)
            for v in vars_of(d.body):
                top = max(top, v.id)
        return top

    def to_source(self) -> SourceProgram:
        clauses = []
        for (name, arity), d in self.defs.items():
            pred: Term = Const(name) if arity == 0 else Compound(name, d.head_vars)
            clauses.append(Clause(Atom(pred), d.body))
        return SourceProgram(clauses)


def _group_clauses(program: SourceProgram) -> dict[tuple[str, int], list[Clause]]:
    groups: dict[tuple[str, int], list[Clause]] = {}
    for c in program.clauses:
        groups.setdefault(c.head.indicator, []).append(c)
    return groups


def _conj_spine(g: Goal) -> list[Goal]:
    out = []
    while isinstance(g, Conj):
        out.append(g.g1)
        g = g.g2
    out.append(g)
    return out


def _disj_spine(g: Goal) -> list[Goal]:
    out = []
    while isinstance(g, Disj):
        out.append(g.g1)
        g = g.g2
    out.append(g)
    return out


def _fold_conj(goals: list[Goal]) -> Goal:
    acc = goals[-1]
    for g in reversed(goals[:-1]):
        acc = Conj(g, acc)
    return acc


def _fold_disj(goals: list[Goal]) -> Goal:
    acc = goals[-1]
    for g in reversed(goals[:-1]):
        acc = Disj(g, acc)
    return acc


def _is_canonical_def(clauses: list[Clause]) -> bool:
    """One clause whose shape already satisfies the canonical form."""
    if len(clauses) != 1 or clauses[0].body is None:
        return False
    clause = clauses[0]
    args = clause.head.args
    if not all(isinstance(a, Var) for a in args) or len(set(args)) != len(args):
        return False
    head_vars = set(args)
    for disjunct in _disj_spine(clause.body):
        conjuncts = _conj_spine(disjunct)
        if len(conjuncts) < len(args) + (1 if args else 0):
            return False
        rest = conjuncts[len(args):]
        for i, arg in enumerate(args):
            eq = conjuncts[i]
            if not (isinstance(eq, Unify) and eq.lhs == arg):
                return False
            if head_vars & set(vars_of(eq.rhs)):
                return False
        if any(head_vars & set(vars_of(g)) for g in rest):
            return False
    return True


def canonicalize(program: SourceProgram) -> CanonicalProgram:
    """Transform a parsed program into canonical form.

    Clauses keep their textual order as disjunct order; argument equalities
    are emitted for every argument, including bare variables.
    """
    next_id = program.max_var_id() + 1
    defs: dict[tuple[str, int], CanonicalDef] = {}
    for indicator, clauses in _group_clauses(program).items():
        name, arity = indicator
        if _is_canonical_def(clauses):
            head_args = clauses[0].head.args
            defs[indicator] = CanonicalDef(tuple(head_args), clauses[0].body)
            continue
        head_vars = []
        for i in range(arity):
            vname = _HEAD_NAMES[i] if i < len(_HEAD_NAMES) else f"X{i + 1}"
            head_vars.append(Var(next_id, vname))
            next_id += 1
        disjuncts = []
        for clause in clauses:
            rest = clause.body if clause.body is not None else TRUE
            prefix: list[Goal] = [
                Unify(x, t) for x, t in zip(head_vars, clause.head.args)
            ]
            disjuncts.append(_fold_conj(prefix + [rest]))
        defs[indicator] = CanonicalDef(tuple(head_vars), _fold_disj(disjuncts))
    return CanonicalProgram(defs)


def load_canonical(program: SourceProgram) -> CanonicalProgram:
    """Load a program that is already in single-clause style, untransformed.

    Requires exactly one clause per predicate with pairwise-distinct variable
    head arguments; facts get the body `true`.  Anything else must go through
    canonicalize().
    """
    defs: dict[tuple[str, int], CanonicalDef] = {}
    for indicator, clauses in _group_clauses(program).items():
        name, arity = indicator
        if len(clauses) != 1:
            raise ValueError(
                f"predicate {name}/{arity} has {len(clauses)} clauses; "
                "a canonical definition is a single clause"
            )
        clause = clauses[0]
        args = clause.head.args
        if not all(isinstance(a, Var) for a in args) or len(set(args)) != len(args):
            raise ValueError(
                f"head of {name}/{arity} must be distinct variables to be "
                "loaded as canonical"
            )
        body = clause.body if clause.body is not None else TRUE
        defs[indicator] = CanonicalDef(tuple(args), body)
    return CanonicalProgram(defs)


def _dump_names(d: CanonicalDef) -> dict[Var, str]:
    names: dict[Var, str] = {}
    taken: set[str] = set()
    for v in list(d.head_vars) + vars_of(d.body):
        if v in names:
            continue
        if v.name == "_":
            names[v] = "_"
            continue
        candidate = v.name
        n = 2
        while candidate in taken:
            candidate = f"{v.name}_{n}"
            n += 1
        names[v] = candidate
        taken.add(candidate)
    return names


def dump_canonical(cp: CanonicalProgram) -> str:
    """Print each definition, one per line, reparseable."""
    lines = []
    for (name, arity), d in cp.defs.items():
        names = _dump_names(d)
        head = (
            name
            if arity == 0
            else f"{name}({','.join(format_term(v, names) for v in d.head_vars)})"
        )
        disjuncts = [
            ", ".join(format_goal(c, names, 999) for c in _conj_spine(b))
            for b in _disj_spine(d.body)
        ]
        lines.append(f"{head} :- {'; '.join(disjuncts)}.")
    return "\n".join(lines) + ("\n" if lines else "")
