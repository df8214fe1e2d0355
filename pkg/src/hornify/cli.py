"""Command-line interface.

Exit codes: 0 success, 2 bad input, 3 not markable, 4 inconclusive check,
5 disagreeing check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .backtranslate import UnclassifiableRule, rewrite_ontology
from .marking import (
    enumerate_markings,
    find_marking,
    find_unary_marking,
    format_marking,
    minimize_marking,
    MarkingProblem,
    parse_marking,
)
from .ontology import OntologyError, parse_dataset, parse_ontology, profile_of, serialize_ontology
from .program import Program, ProgramSyntaxError, parse_program, serialize_program, standard_translate
from .reasoner import AGREE, DISAGREE, BudgetExceeded, check_equisat
from .successor import successor_translate
from .transpose import MarkingError, transpose

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_MARKABLE = 3
EXIT_INCONCLUSIVE = 4
EXIT_DISAGREE = 5

NOT_MARKABLE = "NOT-MARKABLE"


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot write {out}: {e.strerror}") from None


def _translate(o, mode: str) -> Program:
    return successor_translate(o) if mode == "xi" else standard_translate(o)


def _load_program(path: str, mode: str) -> Program:
    """A rules file as is, anything else as an ontology translated with ``mode``."""
    text = _read(path)
    if path.endswith(".rules"):
        return parse_program(text)
    return _translate(parse_ontology(text), mode)


def cmd_translate(args) -> int:
    o = parse_ontology(_read(args.input))
    p = _translate(o, args.mode)
    _write(serialize_program(p, header=[f"{args.mode} translation of {Path(args.input).name}"]),
           args.output)
    return EXIT_OK


def cmd_mark(args) -> int:
    p = _load_program(args.input, args.mode)
    problem = MarkingProblem(p)
    if args.all:
        found = enumerate_markings(p, cap=args.cap, problem=problem)
        if not found:
            print(NOT_MARKABLE)
            return EXIT_NOT_MARKABLE
        for m in found:
            print(format_marking(m))
        return EXIT_OK
    m = find_marking(p, problem)
    if m is None:
        print(NOT_MARKABLE)
        return EXIT_NOT_MARKABLE
    if args.minimal:
        m = minimize_marking(p, m, problem)
    print(format_marking(m))
    return EXIT_OK


def cmd_transpose(args) -> int:
    p = parse_program(_read(args.input))
    m = parse_marking(args.marking, p)
    out = transpose(p, m)
    _write(serialize_program(out, header=[f"marking: {format_marking(m)}"]), args.output)
    return EXIT_OK


def cmd_rewrite(args) -> int:
    o = parse_ontology(_read(args.input))
    rw = rewrite_ontology(o, normalize=args.normalize)
    if rw is None:
        print(NOT_MARKABLE)
        return EXIT_NOT_MARKABLE
    header = [f"Horn rewriting of {Path(args.input).name}",
              f"marking: {format_marking(rw.marking)}",
              f"profile: {profile_of(rw.ontology)}"]
    names = rw.names.describe()
    if names:
        header.append("fresh names:")
        header.extend(f"  {line}" for line in names)
    _write(serialize_ontology(rw.ontology, header=header), args.output)
    return EXIT_OK


def _describe(name: str, r) -> str:
    if r is None:
        return f"{name}: skipped (not markable)"
    return f"{name}: {r.status} depth={r.depth_used} atoms={r.atom_count}"


def cmd_check(args) -> int:
    o = parse_ontology(_read(args.input))
    d = parse_dataset(_read(args.data))
    rep = check_equisat(o, d, args.depth, args.budget)
    print(_describe("original", rep.original))
    print(_describe("successor", rep.via_xi))
    print(_describe("rewritten", rep.rewritten))
    print(f"verdict: {rep.verdict}")
    if args.trace:
        for name, r in (("original", rep.original), ("successor", rep.via_xi),
                        ("rewritten", rep.rewritten)):
            if r is not None and r.trace is not None:
                print(f"-- refutation of {name}")
                print(r.trace.render())
    if rep.verdict == AGREE:
        return EXIT_OK
    return EXIT_DISAGREE if rep.verdict == DISAGREE else EXIT_INCONCLUSIVE


# -- corpus statistics ---------------------------------------------------------------------

STATS_COLUMNS = ("file", "markable_xi", "markable_pi", "horn_dl", "profile_in", "profile_out",
                 "millis")


@dataclass(frozen=True)
class CorpusRow:
    file: str
    parsed: bool
    markable_xi: bool
    markable_pi: bool
    horn_dl: bool  # some marking of the standard translation has no roles
    profile_in: str
    profile_out: str
    millis: int
    error: str = ""


def analyse_file(path: str, timings: bool = True) -> CorpusRow:
    start = time.perf_counter()
    name = Path(path).name
    try:
        o = parse_ontology(Path(path).read_text(encoding="utf-8"))
    except (OSError, OntologyError) as e:
        return CorpusRow(name, False, False, False, False, "", "", 0, str(e))
    pi = standard_translate(o)
    markable_pi = find_marking(pi) is not None
    horn_dl = markable_pi and find_unary_marking(pi) is not None
    rw = rewrite_ontology(o)
    millis = round((time.perf_counter() - start) * 1000) if timings else 0
    return CorpusRow(name, True, rw is not None, markable_pi, horn_dl, str(profile_of(o)),
                     str(profile_of(rw.ontology)) if rw else "", millis)


def corpus_stats(directory: str, jobs: int | None = None, timings: bool = True) -> list[CorpusRow]:
    files = sorted(str(p) for p in Path(directory).glob("*.dlo"))
    if jobs == 1 or len(files) < 2:
        return [analyse_file(f, timings) for f in files]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(analyse_file, files, [timings] * len(files)))


def render_stats(rows: list[CorpusRow], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{k: v for k, v in asdict(r).items() if k in STATS_COLUMNS + ("parsed",)}
                           for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STATS_COLUMNS)
    for r in rows:
        w.writerow([r.file, str(r.markable_xi).lower(), str(r.markable_pi).lower(),
                    str(r.horn_dl).lower(), r.profile_in, r.profile_out, r.millis])
    return buf.getvalue()


def cmd_stats(args) -> int:
    if not Path(args.directory).is_dir():
        raise InputError(f"not a directory: {args.directory}")
    rows = corpus_stats(args.directory, args.jobs, timings=not args.no_timings)
    for r in rows:
        if not r.parsed:
            print(f"{r.file}: {r.error}", file=sys.stderr)
    _write(render_stats(rows, args.format), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hornify",
                                     description="Horn rewriting of markable DL ontologies")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("translate", help="translate an ontology into rules")
    p.add_argument("input")
    p.add_argument("--mode", choices=("pi", "xi"), default="xi")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("mark", help="find markings of an ontology or rules file")
    p.add_argument("input")
    p.add_argument("--mode", choices=("pi", "xi"), default="xi",
                   help="translation used for ontology input")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true", help="list every marking")
    group.add_argument("--minimal", action="store_true", help="print a subset-minimal marking")
    p.add_argument("--cap", type=int, default=16,
                   help="largest number of disjunctive predicates for --all")
    p.set_defaults(func=cmd_mark)

    p = sub.add_parser("transpose", help="transpose a rules file along a marking")
    p.add_argument("input")
    p.add_argument("--marking", required=True, help="comma-separated predicates, Bot for falsehood")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_transpose)

    p = sub.add_parser("rewrite", help="rewrite an ontology into a Horn ontology")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--normalize", action="store_true", help="emit normalized axioms only")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("check", help="compare satisfiability before and after rewriting")
    p.add_argument("input")
    p.add_argument("data")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--budget", type=int, help="atom budget (default HORNIFY_BUDGET or 10^6)")
    p.add_argument("--trace", action="store_true", help="print refutation traces")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("stats", help="markability statistics for a directory of ontologies")
    p.add_argument("directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--no-timings", action="store_true",
                   help="report 0 milliseconds so that output is reproducible")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    if getattr(args, "depth", 0) is not None and getattr(args, "depth", 0) < 0:
        print("hornify: --depth must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except UnclassifiableRule as e:
        print(f"hornify: internal error: {e}", file=sys.stderr)
        return 1
    except (InputError, OntologyError, ProgramSyntaxError, MarkingError, ValueError,
            BudgetExceeded) as e:
        print(f"hornify: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
