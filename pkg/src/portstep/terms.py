"""Terms, goals, substitutions and most-general unification.

Terms are the object language: variables (integer identity, display name),
constants, integers and compounds.  Goals are the subset of terms the engine
drives through ports: true, fail, explicit unification, user predications,
conjunction and disjunction.  Goals convert losslessly to and from terms.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

# structural recursion mirrors term depth; generated terms can nest deeply
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))


@dataclass(frozen=True)
class Var:
    """A logic variable.  Identity is the numeric id; the name is display-only.

    A single allocator hands out ids, so two Vars are the same variable
    exactly when their ids are equal.
    """

    id: int
    name: str = "_"


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("zero-arity predications are Const, not Compound")


Term = Union[Var, Const, Int, Compound]


# ---------------------------------------------------------------------------
# Goals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrueGoal:
    pass


@dataclass(frozen=True)
class FailGoal:
    pass


@dataclass(frozen=True)
class Unify:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Atom:
    """A user-defined predication.  Never wraps true, fail or t1=t2."""

    pred: Term

    def __post_init__(self) -> None:
        p = self.pred
        if isinstance(p, Const):
            if p.name in ("true", "fail"):
                raise ValueError(f"{p.name} is not an atomary goal")
        elif isinstance(p, Compound):
            if p.functor in (",", ";", "=") and len(p.args) == 2:
                raise ValueError(f"control construct {p.functor}/2 is not an atomary goal")
        else:
            raise ValueError(f"atom must be a Const or Compound, got {p!r}")

    @property
    def functor(self) -> str:
        return self.pred.name if isinstance(self.pred, Const) else self.pred.functor

    @property
    def args(self) -> tuple[Term, ...]:
        return () if isinstance(self.pred, Const) else self.pred.args

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.functor, len(self.args))


@dataclass(frozen=True)
class Conj:
    g1: "Goal"
    g2: "Goal"


@dataclass(frozen=True)
class Disj:
    g1: "Goal"
    g2: "Goal"


Goal = Union[TrueGoal, FailGoal, Unify, Atom, Conj, Disj]

TRUE = TrueGoal()
FAIL = FailGoal()


def goal_to_term(g: Goal) -> Term:
    """Lower a goal to its object-level term."""
    if isinstance(g, TrueGoal):
        return Const("true")
    if isinstance(g, FailGoal):
        return Const("fail")
    if isinstance(g, Unify):
        return Compound("=", (g.lhs, g.rhs))
    if isinstance(g, Atom):
        return g.pred
    if isinstance(g, Conj):
        return Compound(",", (goal_to_term(g.g1), goal_to_term(g.g2)))
    if isinstance(g, Disj):
        return Compound(";", (goal_to_term(g.g1), goal_to_term(g.g2)))
    raise TypeError(f"not a goal: {g!r}")


def term_to_goal(t: Term) -> Goal:
    """Read a term back as a goal; raises ValueError for non-goal terms."""
    if isinstance(t, Const):
        if t.name == "true":
            return TRUE
        if t.name == "fail":
            return FAIL
        return Atom(t)
    if isinstance(t, Compound):
        if t.functor == "," and len(t.args) == 2:
            return Conj(term_to_goal(t.args[0]), term_to_goal(t.args[1]))
        if t.functor == ";" and len(t.args) == 2:
            return Disj(term_to_goal(t.args[0]), term_to_goal(t.args[1]))
        if t.functor == "=" and len(t.args) == 2:
            return Unify(t.args[0], t.args[1])
        return Atom(t)
    raise ValueError(f"not a goal: {t!r}")


def vars_of(x: Term | Goal | Iterable) -> list[Var]:
    """Distinct variables of a term or goal, in first-occurrence order."""
    seen: dict[Var, None] = {}

    def walk(y) -> None:
        if isinstance(y, Var):
            seen.setdefault(y)
        elif isinstance(y, Compound):
            for a in y.args:
                walk(a)
        elif isinstance(y, Unify):
            walk(y.lhs)
            walk(y.rhs)
        elif isinstance(y, Atom):
            walk(y.pred)
        elif isinstance(y, (Conj, Disj)):
            walk(y.g1)
            walk(y.g2)
        elif isinstance(y, (Const, Int, TrueGoal, FailGoal)):
            pass
        else:
            for item in y:
                walk(item)

    walk(x)
    return list(seen)


# ---------------------------------------------------------------------------
# Substitutions
# ---------------------------------------------------------------------------


class Subst:
    """A substitution: a finite map from variables to terms.

    mgu() output is idempotent (applying twice equals applying once) and no
    binding maps a variable to itself; the constructor drops identity
    bindings but idempotence is a property of how the map was built.
    """

    __slots__ = ("_m",)

    def __init__(self, bindings: Mapping[Var, Term] | None = None):
        self._m: dict[Var, Term] = {
            v: t for v, t in (bindings or {}).items() if t != v
        }

    def get(self, v: Var) -> Term | None:
        return self._m.get(v)

    def items(self):
        return self._m.items()

    @property
    def domain(self) -> tuple[Var, ...]:
        return tuple(self._m)

    def __contains__(self, v: Var) -> bool:
        return v in self._m

    def __len__(self) -> int:
        return len(self._m)

    def __bool__(self) -> bool:
        return bool(self._m)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subst) and self._m == other._m

    def __hash__(self):
        return hash(frozenset(self._m.items()))

    def __repr__(self) -> str:
        inside = ",".join(f"{v.name}/{t!r}" for v, t in self._m.items())
        return "{" + inside + "}"

    def apply(self, x):
        """Apply to a term or goal in a single structural pass."""
        if isinstance(x, Var):
            return self._m.get(x, x)
        if isinstance(x, Compound):
            return Compound(x.functor, tuple(self.apply(a) for a in x.args))
        if isinstance(x, (Const, Int, TrueGoal, FailGoal)):
            return x
        if isinstance(x, Unify):
            return Unify(self.apply(x.lhs), self.apply(x.rhs))
        if isinstance(x, Atom):
            return Atom(self.apply(x.pred))
        if isinstance(x, Conj):
            return Conj(self.apply(x.g1), self.apply(x.g2))
        if isinstance(x, Disj):
            return Disj(self.apply(x.g1), self.apply(x.g2))
        raise TypeError(f"cannot apply substitution to {x!r}")

    def compose(self, later: "Subst") -> "Subst":
        """Substitution u with u(x) = later(self(x)) for every term x."""
        out: dict[Var, Term] = {v: later.apply(t) for v, t in self._m.items()}
        for v, t in later.items():
            if v not in self._m:
                out[v] = t
        return Subst(out)

    def restrict(self, keep: Iterable[Var]) -> "Subst":
        wanted = set(keep)
        return Subst({v: t for v, t in self._m.items() if v in wanted})


EMPTY_SUBST = Subst()


def _walk(t: Term, bind: dict[Var, Term]) -> Term:
    while isinstance(t, Var) and t in bind:
        t = bind[t]
    return t


def _occurs(v: Var, t: Term, bind: dict[Var, Term]) -> bool:
    t = _walk(t, bind)
    if isinstance(t, Var):
        return t == v
    if isinstance(t, Compound):
        return any(_occurs(v, a, bind) for a in t.args)
    return False


def _resolve(t: Term, bind: dict[Var, Term], expanding: frozenset[Var]) -> Term:
    # expanding guards against self-referential bindings created when the
    # occurs check is disabled; such chains are cut at the looping variable.
    while isinstance(t, Var):
        if t in expanding or t not in bind:
            return t
        expanding = expanding | {t}
        t = bind[t]
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_resolve(a, bind, expanding) for a in t.args))
    return t


def mgu(t1: Term, t2: Term, occurs_check: bool = True) -> Subst | None:
    """Most general unifier of two terms, or None when there is none.

    The result is idempotent: bindings are fully resolved through each other,
    so no bound variable occurs in any right-hand side.  With occurs_check
    disabled, unifying a variable with a term containing it produces a
    non-idempotent self-referential binding (finite terms only, no rational
    trees).
    """
    bind: dict[Var, Term] = {}
    todo: list[tuple[Term, Term]] = [(t1, t2)]
    while todo:
        a, b = todo.pop()
        a = _walk(a, bind)
        b = _walk(b, bind)
        if a == b and not isinstance(a, Compound):
            continue
        if isinstance(a, Var):
            if occurs_check and _occurs(a, b, bind):
                return None
            bind[a] = b
            continue
        if isinstance(b, Var):
            if occurs_check and _occurs(b, a, bind):
                return None
            bind[b] = a
            continue
        if (
            isinstance(a, Compound)
            and isinstance(b, Compound)
            and a.functor == b.functor
            and len(a.args) == len(b.args)
        ):
            todo.extend(zip(a.args, b.args))
            continue
        return None
    out: dict[Var, Term] = {}
    for v in bind:
        r = _resolve(v, bind, frozenset())
        if r != v:
            out[v] = r
    return Subst(out)


def alpha_equivalent(a, b) -> bool:
    """Structural equality up to a bijective renaming of variables."""
    fwd: dict[Var, Var] = {}
    rev: dict[Var, Var] = {}

    def walk(x, y) -> bool:
        if isinstance(x, Var) or isinstance(y, Var):
            if not (isinstance(x, Var) and isinstance(y, Var)):
                return False
            if x in fwd:
                return fwd[x] == y and rev.get(y) == x
            if y in rev:
                return False
            fwd[x] = y
            rev[y] = x
            return True
        if type(x) is not type(y):
            return False
        if isinstance(x, (Const, Int, TrueGoal, FailGoal)):
            return x == y
        if isinstance(x, Compound):
            return (
                x.functor == y.functor
                and len(x.args) == len(y.args)
                and all(walk(p, q) for p, q in zip(x.args, y.args))
            )
        if isinstance(x, Unify):
            return walk(x.lhs, y.lhs) and walk(x.rhs, y.rhs)
        if isinstance(x, Atom):
            return walk(x.pred, y.pred)
        if isinstance(x, (Conj, Disj)):
            return walk(x.g1, y.g1) and walk(x.g2, y.g2)
        return x == y

    return walk(a, b)
