"""Render journals as textual traces.

Three renderings share one deterministic variable-naming pass:

* raw        - events verbatim, goals unsubstituted, the fixture format
* pretty     - goals shown under the current substitution, indented by depth
* structured - one self-describing record per event, the wire format

A raw line is `port goal [astack][bstack]`: stacks print top-first with `·`
separators and a `nil` terminator, tags as `1/`/`2/`, definition memos as
`body▸atom`, disjunct memos as `chosen↣(tag/g1;g2)`, and mgus as binding
sets like `{X/1}`.  ASCII fallbacks `=>` and `~>` replace the memo glyphs
behind a flag.  See docs/trace-format.md.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import Journal
from .events import (
    Ancestor,
    Bet,
    DefMemo,
    Event,
    MguBet,
    PlainAtom,
    PlainOther,
    TaggedConj,
    subst_of,
)
from .terms import Conj, Disj, Goal, Var, vars_of

DEF_GLYPH = "▸"  # body▸atom
DISJ_GLYPH = "↣"  # chosen↣(tag/pair)
DEF_GLYPH_ASCII = "=>"
DISJ_GLYPH_ASCII = "~>"


class VarNamer:
    """Assigns stable display names to variable ids in appearance order.

    The first id carrying a source name keeps it bare; later ids with the
    same name get `name_2`, `name_3`, ...  Names never change once assigned,
    so renderings of a journal prefix are stable as the journal grows.
    Anonymous variables always display as `_`.
    """

    def __init__(self) -> None:
        self.names: dict[Var, str] = {}
        self._taken: set[str] = set()
        self._per_name: dict[str, int] = {}

    def observe(self, x) -> None:
        for v in vars_of(x):
            if v in self.names:
                continue
            if v.name == "_":
                self.names[v] = "_"
                continue
            count = self._per_name.get(v.name, 0) + 1
            self._per_name[v.name] = count
            candidate = v.name if count == 1 else f"{v.name}_{count}"
            while candidate in self._taken:
                count += 1
                self._per_name[v.name] = count
                candidate = f"{v.name}_{count}"
            self.names[v] = candidate
            self._taken.add(candidate)

    def observe_event(self, e: Event) -> None:
        self.observe(e.goal)
        for anc in e.astack:
            self.observe(_ancestor_parts(anc))
        for bet in e.bstack:
            if isinstance(bet, MguBet):
                for v, t in bet.subst.items():
                    self.observe(v)
                    self.observe(t)
            elif isinstance(bet, DefMemo):
                self.observe((bet.body, bet.atom))
            else:
                self.observe((bet.chosen, bet.g1, bet.g2))


def _ancestor_parts(anc: Ancestor) -> tuple:
    if isinstance(anc, PlainAtom):
        return (anc.atom,)
    if isinstance(anc, PlainOther):
        return (anc.goal,)
    return (anc.g1, anc.g2)


def _goal_slot(g: Goal, names) -> str:
    from .reader import format_goal

    text = format_goal(g, names)
    return f"({text})" if isinstance(g, (Conj, Disj)) else text


def _operand(g: Goal, names) -> str:
    from .reader import format_goal

    text = format_goal(g, names)
    return f"({text})" if isinstance(g, (Conj, Disj)) else text


def format_ancestor(anc: Ancestor, names) -> str:
    from .reader import format_goal

    if isinstance(anc, PlainAtom):
        return format_goal(anc.atom, names)
    if isinstance(anc, PlainOther):
        return format_goal(anc.goal, names)
    pair = Conj(anc.g1, anc.g2) if isinstance(anc, TaggedConj) else Disj(anc.g1, anc.g2)
    return f"{int(anc.tag)}/{format_goal(pair, names)}"


def format_bet(bet: Bet, names, ascii_memos: bool = False) -> str:
    from .reader import format_goal, format_term

    if isinstance(bet, MguBet):
        inside = ",".join(
            f"{format_term(v, names)}/{format_term(t, names)}"
            for v, t in bet.subst.items()
        )
        return "{" + inside + "}"
    if isinstance(bet, DefMemo):
        glyph = DEF_GLYPH_ASCII if ascii_memos else DEF_GLYPH
        return f"{_operand(bet.body, names)}{glyph}{format_goal(bet.atom, names)}"
    glyph = DISJ_GLYPH_ASCII if ascii_memos else DISJ_GLYPH
    pair = Disj(bet.g1, bet.g2)
    return f"{_operand(bet.chosen, names)}{glyph}({int(bet.tag)}/{format_goal(pair, names)})"


def _stack_text(parts: list[str]) -> str:
    return "·".join(parts + ["nil"])


@dataclass
class TraceLine:
    index: int
    port: str
    goal_text: str
    astack_text: str
    bstack_text: str
    indent: int = 0

    @property
    def text(self) -> str:
        pad = "  " * self.indent
        return f"{pad}{self.port} {self.goal_text} [{self.astack_text}][{self.bstack_text}]"


def journal_names(journal: Journal) -> dict[Var, str]:
    namer = VarNamer()
    for entry in journal.entries:
        namer.observe_event(entry.event)
    return namer.names


def _render_event(
    e: Event, names, ascii_memos: bool, pretty: bool
) -> tuple[str, str, str]:
    goal = subst_of(e.bstack, e.goal) if pretty else e.goal
    goal_text = _goal_slot(goal, names)
    astack = _stack_text([format_ancestor(a, names) for a in e.astack])
    bstack = _stack_text([format_bet(b, names, ascii_memos) for b in e.bstack])
    return goal_text, astack, bstack


def render_raw(journal: Journal, ascii_memos: bool = False) -> list[TraceLine]:
    """Events verbatim; no substitution is applied to the goal."""
    names = journal_names(journal)
    lines = []
    for i, entry in enumerate(journal.entries):
        g, a, b = _render_event(entry.event, names, ascii_memos, pretty=False)
        lines.append(TraceLine(i, entry.event.port.value, g, a, b))
    return lines


def render_pretty(journal: Journal, ascii_memos: bool = False) -> list[TraceLine]:
    """Goals shown under the current substitution, indented by A-stack depth."""
    names = journal_names(journal)
    lines = []
    for i, entry in enumerate(journal.entries):
        g, a, b = _render_event(entry.event, names, ascii_memos, pretty=True)
        lines.append(
            TraceLine(i, entry.event.port.value, g, a, b, indent=len(entry.event.astack))
        )
    return lines


def structured_record(
    index: int, event: Event, rule: str | None, names, ascii_memos: bool = False
) -> dict:
    goal_text, _, _ = _render_event(event, names, ascii_memos, pretty=False)
    return {
        "index": index,
        "port": event.port.value,
        "goal": goal_text,
        "astack": [format_ancestor(a, names) for a in event.astack],
        "bstack": [format_bet(b, names, ascii_memos) for b in event.bstack],
        "rule_applied": rule if rule is not None else "initial",
    }


def render_structured(journal: Journal, ascii_memos: bool = False) -> list[dict]:
    """One record per event; the golden-fixture and wire format."""
    names = journal_names(journal)
    return [
        structured_record(i, entry.event, entry.rule, names, ascii_memos)
        for i, entry in enumerate(journal.entries)
    ]


def render_text(lines: list[TraceLine]) -> str:
    return "\n".join(line.text for line in lines) + ("\n" if lines else "")
