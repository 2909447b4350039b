"""Command-line entry point.

Exit codes: 0 at least one answer, 1 finite failure, 2 step budget
exhausted, 64 usage or syntax errors.
"""

from __future__ import annotations

import argparse
import sys

from .canonical import CanonicalProgram, canonicalize, dump_canonical, load_canonical
from .engine import DEFAULT_MAX_STEPS, computed_answer, enumerate_answers, run
from .events import Port
from .oracle import GenConfig, generate_program
from .reader import (
    PrologSyntaxError,
    format_goal,
    format_program,
    format_term,
    parse_program,
    parse_query,
)
from .terms import Atom, vars_of
from .tracer import render_pretty, render_raw, render_structured, render_text

EXIT_ANSWERS = 0
EXIT_FALSE = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="portstep", description=__doc__)
    p.add_argument("--program", metavar="FILE", help="program file (UTF-8)")
    p.add_argument("--query", metavar="GOAL", help="query goal to run")
    p.add_argument(
        "--all-solutions",
        action="store_true",
        help="enumerate every answer instead of stopping at the first",
    )
    p.add_argument(
        "--trace",
        choices=("off", "raw", "pretty", "structured"),
        default="off",
        help="emit the execution trace (default: off)",
    )
    p.add_argument("--trace-out", metavar="FILE", help="write the trace here instead of stderr")
    p.add_argument(
        "--max-steps",
        type=int,
        default=DEFAULT_MAX_STEPS,
        metavar="N",
        help=f"transition budget (default {DEFAULT_MAX_STEPS})",
    )
    p.add_argument(
        "--no-occurs-check",
        action="store_true",
        help="disable the occurs check in unification",
    )
    p.add_argument(
        "--dump-canonical",
        action="store_true",
        help="print the canonicalized program and exit unless a query is given",
    )
    p.add_argument(
        "--assume-canonical",
        action="store_true",
        help="load the program verbatim as single-clause definitions",
    )
    p.add_argument(
        "--ascii-memos",
        action="store_true",
        help="render memos with ASCII arrows instead of glyphs",
    )
    p.add_argument("--serve", type=int, metavar="PORT", help="run the debug service")
    p.add_argument("--gen", action="store_true", help="generate a random pure program")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--gen-predicates", type=int, default=4, metavar="N")
    p.add_argument("--gen-clauses", type=int, default=3, metavar="N")
    p.add_argument("--gen-body", type=int, default=4, metavar="N")
    return p


def _load_program(args) -> CanonicalProgram:
    text = ""
    if args.program:
        with open(args.program, encoding="utf-8") as fh:
            text = fh.read()
    source = parse_program(text)
    if args.assume_canonical:
        return load_canonical(source)
    return canonicalize(source)


def _warn_undefined(journal) -> None:
    seen = set()
    for entry in journal.entries:
        g = entry.event.goal
        if (
            entry.event.port is Port.CALL
            and isinstance(g, Atom)
            and g.indicator not in journal.program.defs
            and g.indicator not in seen
        ):
            seen.add(g.indicator)
            name, arity = g.indicator
            print(f"warning: undefined predicate {name}/{arity}", file=sys.stderr)


def _emit_trace(journal, args) -> None:
    if args.trace == "off":
        return
    if args.trace == "raw":
        text = render_text(render_raw(journal, args.ascii_memos))
    elif args.trace == "pretty":
        text = render_text(render_pretty(journal, args.ascii_memos))
    else:
        import json

        records = render_structured(journal, args.ascii_memos)
        text = "\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n"
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)


def _print_answer(query, subst) -> None:
    qvars = vars_of(query)
    if not qvars:
        print("true.")
        return
    parts = [f"{v.name} = {format_term(subst.get(v) or v)}" for v in qvars]
    print(", ".join(parts))


def _run_query(args) -> int:
    try:
        program = _load_program(args)
        query = parse_query(args.query, start_id=program.max_var_id() + 1)
    except (PrologSyntaxError, ValueError) as exc:
        print(f"portstep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.dump_canonical:
        sys.stdout.write(dump_canonical(program))
    occurs_check = not args.no_occurs_check
    if args.all_solutions:
        result = enumerate_answers(query, program, args.max_steps, occurs_check)
        journal, outcome = result.journal, result.outcome
        for answer in result.answers:
            _print_answer(query, answer)
        got_answer = bool(result.answers)
    else:
        result = run(query, program, args.max_steps, occurs_check)
        journal, outcome = result.journal, result.outcome
        got_answer = outcome == "success"
        if got_answer:
            _print_answer(query, computed_answer(query, result.final_event.bstack))
    _warn_undefined(journal)
    _emit_trace(journal, args)
    if outcome == "budget":
        print("% step budget exhausted", file=sys.stderr)
        return EXIT_BUDGET
    if not got_answer:
        print("false.")
        return EXIT_FALSE
    return EXIT_ANSWERS


def _run_gen(args) -> int:
    cfg = GenConfig(
        max_predicates=args.gen_predicates,
        max_clauses_per_pred=args.gen_clauses,
        max_body_len=args.gen_body,
        seed=args.seed,
    )
    program, queries = generate_program(cfg)
    sys.stdout.write(format_program(program))
    for q in queries:
        print(f"% query: {format_goal(q)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.gen:
        return _run_gen(args)
    if args.serve is not None:
        if args.query:
            print("portstep: --serve excludes one-shot --query mode", file=sys.stderr)
            return EXIT_USAGE
        from .service import serve_forever

        return serve_forever(args.serve)
    if args.dump_canonical and not args.query:
        try:
            sys.stdout.write(dump_canonical(_load_program(args)))
        except (PrologSyntaxError, ValueError) as exc:
            print(f"portstep: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return 0
    if not args.query:
        parser.print_usage(sys.stderr)
        print("portstep: a --query (or --gen/--serve/--dump-canonical) is required", file=sys.stderr)
        return EXIT_USAGE
    return _run_query(args)


if __name__ == "__main__":
    sys.exit(main())
