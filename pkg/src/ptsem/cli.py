"""Command-line front end: ``ptsem <command> NET [options]``.

Exit codes: 0 success / true / holds, 1 false / violated, 2 unknown (a bound
was hit), 64 usage error, 65 net-file parse error.  Words are written as
space-separated transition names, ``ε`` for the empty word.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import TextIO

from . import oracles
from .conflict import DEFAULT_DEPTH, DEFAULT_GMAX, DEFAULT_TOKENS, check_structural, find_conflicts
from .generator import (
    GenerationExhausted,
    GenParams,
    random_net,
    random_one_safe_net,
    random_structural_conflict_net,
)
from .io_format import NetParseError, export_process, import_process, parse_net, write_net
from .multiset import Multiset
from .net import FiringError, Net, Word, explore, fire_sequence, fire_step
from .process import (
    ChoiceError,
    ExplicitChoice,
    Process,
    ProcessError,
    build_process,
    linearisations,
    pi_members,
    validate_process,
)
from .swap import bdify, maximal_processes, swap_equivalent
from .traces import enumerate_runs, finite_run, run_conflict_free, trace_class, trace_equivalent

DEFAULT_LIMIT = 10000

OK, FALSE, UNKNOWN, USAGE, PARSE = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class CommandResult:
    code: int
    out: str
    err: str


def show(word: Word) -> str:
    return " ".join(word) or "ε"


def parse_word(net: Net, text: str) -> Word:
    word = tuple(text.split())
    unknown = [t for t in word if t not in net.transitions]
    if unknown:
        raise UsageError(f"unknown transition(s): {', '.join(unknown)}")
    return word


def _firing_word(net: Net, text: str) -> Word:
    word = parse_word(net, text)
    try:
        fire_sequence(net, net.initial, word)
    except FiringError as exc:
        raise UsageError(f"{show(word)} is not a firing sequence: {exc}") from None
    return word


def parse_choices(text: str) -> dict[tuple[int, str], list[int]]:
    """``"3:4=1 5:p=0,1"``: at (1-based) position 3 take the token with
    index 1 (oldest first) from place 4."""
    out = {}
    for item in text.split():
        try:
            where, idx = item.split("=")
            pos, place = where.split(":")
            out[(int(pos) - 1, place)] = [int(i) for i in idx.split(",")]
        except ValueError:
            raise UsageError(f"bad choice {item!r}, expected POS:PLACE=I[,J..]") from None
    return out


def load_process(net: Net, spec: str) -> Process:
    """``"a b c"``, ``"a b c | 3:4=1"`` or ``@file.json``."""
    if spec.startswith("@"):
        try:
            with open(spec[1:], encoding="utf-8") as fh:
                P = import_process(fh.read(), net)
            return validate_process(P)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot load process {spec}: {exc}") from None
    word_text, _, choice_text = spec.partition("|")
    word = _firing_word(net, word_text)
    policy = ExplicitChoice(parse_choices(choice_text)) if choice_text.strip() else "oldest"
    try:
        return build_process(net, word, policy)
    except ChoiceError as exc:
        raise UsageError(str(exc)) from None


def load_net(path: str) -> Net:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_net(text)


# -- commands ----------------------------------------------------------------

def cmd_validate(args, net: Net, out: TextIO) -> int:
    print(f"valid: {len(net.places)} places, {len(net.transitions)} transitions, "
          f"{len(net.arcs)} arcs, M0 = {net.initial}", file=out)
    return OK


def cmd_fire(args, net: Net, out: TextIO) -> int:
    word = parse_word(net, args.seq)
    try:
        m = fire_sequence(net, net.initial, word)
        if args.step is not None:
            step = Multiset(parse_word(net, args.step))
            if not step:
                raise UsageError("--step must name at least one transition")
            m = fire_step(net, m, step)
    except FiringError as exc:
        print(f"not enabled: {exc}", file=out)
        return FALSE
    print(m, file=out)
    return OK


def cmd_reach(args, net: Net, out: TextIO) -> int:
    ex = explore(net, args.depth, args.tokens)
    for m, w in ex.markings.items():
        print(f"{m}  via {show(w)}", file=out)
    print(f"{len(ex.markings)} markings, truncated={str(ex.truncated).lower()}", file=out)
    return UNKNOWN if ex.truncated else OK


def _emit(text: str, path: str | None, out: TextIO) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_process(args, net: Net, out: TextIO) -> int:
    P = load_process(net, args.proc)
    _emit(export_process(P, args.format), args.out, out)
    return OK


def cmd_lin(args, net: Net, out: TextIO) -> int:
    P = load_process(net, args.proc)
    words = sorted(linearisations(P))
    for w in words:
        print(show(w), file=out)
    print(f"{len(words)} linearisations", file=out)
    return OK


def cmd_pi(args, net: Net, out: TextIO) -> int:
    word = _firing_word(net, args.seq)
    members, truncated = pi_members(net, word, limit=args.limit)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    for i, P in enumerate(members, 1):
        if args.out:
            with open(os.path.join(args.out, f"process-{i}.json"), "w", encoding="utf-8") as fh:
                fh.write(export_process(P, "structured"))
        else:
            print(f"-- process {i}", file=out)
            out.write(export_process(P, args.format))
    print(f"{len(members)} processes up to isomorphism, truncated={str(truncated).lower()}", file=out)
    return UNKNOWN if truncated else OK


def cmd_swap_equiv(args, net: Net, out: TextIO) -> int:
    if len(args.proc) != 2:
        raise UsageError("swap-equiv needs exactly two --proc arguments")
    P, Q = (load_process(net, s) for s in args.proc)
    result = swap_equivalent(P, Q, method=args.method)
    print(str(result).lower(), file=out)
    return OK if result else FALSE


def cmd_trace_class(args, net: Net, out: TextIO) -> int:
    tc = trace_class(net, _firing_word(net, args.seq))
    print(f"class size {tc.size}, representative {show(tc.representative)}", file=out)
    for w in sorted(tc.members):
        print(f"  {show(w)}", file=out)
    return OK


def cmd_trace_equiv(args, net: Net, out: TextIO) -> int:
    if len(args.seq) != 2:
        raise UsageError("trace-equiv needs exactly two --seq arguments")
    a, b = (_firing_word(net, s) for s in args.seq)
    result = trace_equivalent(net, a, b)
    print(str(result).lower(), file=out)
    return OK if result else FALSE


def cmd_runs(args, net: Net, out: TextIO) -> int:
    runs = enumerate_runs(net, args.depth)
    n = len(runs.maximal)
    noun = "maximal run" if n == 1 else "maximal runs"
    if n == 1:
        c = runs.maximal[0]
        print(f"{n} {noun} ({c.size} sequences), representative {show(c.representative)}", file=out)
    else:
        print(f"{n} {noun}", file=out)
        for c in runs.maximal:
            print(f"  [{show(c.representative)}] ({c.size} sequences)", file=out)
    print(f"truncated={str(runs.truncated).lower()}", file=out)
    if runs.truncated:
        return UNKNOWN
    return OK if n == 1 else FALSE


def _report_verdict(v, out: TextIO, holds_text: str) -> int:
    print(str(v.status), file=out)
    if v.violated:
        print(f"witness: {v.witness}", file=out)
    elif v.holds:
        print(holds_text, file=out)
    else:
        print("bound reached before a verdict: " + ", ".join(f"{k}={b}" for k, b in v.bounds.items()), file=out)
    return v.status.exit_code


def cmd_run_conflict_free(args, net: Net, out: TextIO) -> int:
    if args.seq is not None:
        top = trace_class(net, _firing_word(net, args.seq))
    else:
        runs = enumerate_runs(net, args.depth)
        if len(runs.maximal) != 1:
            raise UsageError(f"{len(runs.maximal)} maximal runs at depth {args.depth}; pick one with --seq")
        top = runs.maximal[0]
    v = run_conflict_free(net, finite_run(net, top), gmax=args.gmax)
    return _report_verdict(v, out, f"run below [{show(top.representative)}] is conflict-free")


def cmd_conflicts(args, net: Net, out: TextIO) -> int:
    search = find_conflicts(net, args.depth, args.tokens, args.gmax)
    for w in search.witnesses:
        print(w, file=out)
    v = search.verdict
    n = len(search.witnesses)
    print(f"{n} {'conflict' if n == 1 else 'conflicts'}, truncated={str(search.truncated).lower()}", file=out)
    return v.status.exit_code


def cmd_structural(args, net: Net, out: TextIO) -> int:
    v = check_structural(net, args.depth, args.tokens)
    return _report_verdict(v, out, "structural conflict net within the bounds")


def cmd_max_processes(args, net: Net, out: TextIO) -> int:
    mp = maximal_processes(net, args.depth)
    for c in mp.classes:
        print(c, file=out)
    noun = "maximal class" if len(mp.classes) == 1 else "maximal classes"
    print(f"{len(mp.classes)} {noun}, verdict {mp.verdict}", file=out)
    return {"unique": OK, "multiple": FALSE, "unknown": UNKNOWN}[mp.verdict]


def cmd_bdify(args, net: Net, out: TextIO) -> int:
    run = bdify(load_process(net, args.proc))
    for c in run.sorted():
        print(c, file=out)
    print(f"{len(run)} classes", file=out)
    return OK


def cmd_generate(args, out: TextIO) -> int:
    try:
        p = GenParams(args.places, args.transitions, args.density, args.max_weight,
                      args.max_tokens, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        if args.kind == "structural":
            net = random_structural_conflict_net(p, args.depth, args.tokens)
        elif args.kind == "one-safe":
            net = random_one_safe_net(p, args.depth)
        else:
            net = random_net(p)
    except GenerationExhausted as exc:
        print(exc, file=sys.stderr)
        return UNKNOWN
    _emit(write_net(net), args.out, out)
    return OK


def cmd_properties(args, out: TextIO) -> int:
    from . import fixture

    ok = True
    nets = {n: fixture(n) for n in ("NET-A", "NET-B", "NET-C")}
    for text, passed in oracles.fixture_checks(nets):
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {text}", file=out)
    for report in oracles.run_all(args.seed, args.scale):
        ok &= report.ok
        print(report.render(), file=out)
        if args.witness_dir and report.failures:
            os.makedirs(args.witness_dir, exist_ok=True)
            for f in report.failures:
                name = f"{f.suite}-{f.seed}-{f.index}.json"
                with open(os.path.join(args.witness_dir, name), "w", encoding="utf-8") as fh:
                    json.dump(f.to_dict(), fh, indent=2)
    return OK if ok else FALSE


# -- argument parsing ----------------------------------------------------------

def _bounds(p: argparse.ArgumentParser, *which: str) -> None:
    if "depth" in which:
        p.add_argument("--depth", type=int, default=DEFAULT_DEPTH,
                       help=f"exploration depth bound (default {DEFAULT_DEPTH})")
    if "tokens" in which:
        p.add_argument("--tokens", type=int, default=DEFAULT_TOKENS,
                       help=f"per-place token bound (default {DEFAULT_TOKENS})")
    if "gmax" in which:
        p.add_argument("--gmax", type=int, default=DEFAULT_GMAX,
                       help=f"largest multiplicity in a step (default {DEFAULT_GMAX})")
    if "limit" in which:
        p.add_argument("--limit", type=int, default=DEFAULT_LIMIT,
                       help=f"cap on enumerated token choices (default {DEFAULT_LIMIT})")


NET_COMMANDS = {
    "validate": (cmd_validate, "parse and validate a net file"),
    "fire": (cmd_fire, "fire a sequence (and optionally a step) from M0"),
    "reach": (cmd_reach, "bounded reachable markings"),
    "process": (cmd_process, "build and export a process"),
    "lin": (cmd_lin, "linearisations of a process"),
    "pi": (cmd_pi, "processes of a firing sequence, up to isomorphism"),
    "swap-equiv": (cmd_swap_equiv, "are two processes swapping equivalent"),
    "trace-class": (cmd_trace_class, "adjacency class of a firing sequence"),
    "trace-equiv": (cmd_trace_equiv, "are two firing sequences trace equivalent"),
    "runs": (cmd_runs, "maximal runs up to a depth"),
    "run-conflict-free": (cmd_run_conflict_free, "check a finite run for unresolved conflicts"),
    "conflicts": (cmd_conflicts, "semantic conflicts at reachable markings"),
    "structural": (cmd_structural, "check the structural-conflict property"),
    "max-processes": (cmd_max_processes, "maximal processes up to swapping"),
    "bdify": (cmd_bdify, "classes below the prefixes of a process"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptsem", description="Analyse P/T nets: processes, swapping, runs and conflicts.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    cmds = {}
    for name, (_, help_text) in NET_COMMANDS.items():
        cmds[name] = p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("net", help="net file")

    cmds["fire"].add_argument("--seq", default="", help='e.g. "a b c"')
    cmds["fire"].add_argument("--step", help='step fired after the sequence, e.g. "a b"')
    _bounds(cmds["reach"], "depth", "tokens")
    proc_help = 'word, word with choices ("a b c | 3:4=1"), or @file.json'
    for name in ("process", "lin", "bdify"):
        cmds[name].add_argument("--proc", "--seq", dest="proc", required=True, help=proc_help)
    cmds["process"].add_argument("--format", choices=["structured", "graph"], default="structured")
    cmds["process"].add_argument("--out", help="output file (default standard output)")
    cmds["pi"].add_argument("--seq", required=True)
    cmds["pi"].add_argument("--format", choices=["structured", "graph"], default="structured")
    cmds["pi"].add_argument("--out", help="directory receiving one JSON file per process")
    _bounds(cmds["pi"], "limit")
    cmds["swap-equiv"].add_argument("--proc", action="append", default=[], help=proc_help)
    cmds["swap-equiv"].add_argument("--method", choices=["via-traces", "direct-bfs"], default="via-traces")
    cmds["trace-class"].add_argument("--seq", required=True)
    cmds["trace-equiv"].add_argument("--seq", action="append", default=[])
    _bounds(cmds["runs"], "depth")
    cmds["run-conflict-free"].add_argument("--seq", help="top of the run (default: the unique maximal run)")
    _bounds(cmds["run-conflict-free"], "depth", "gmax")
    _bounds(cmds["conflicts"], "depth", "tokens", "gmax")
    _bounds(cmds["structural"], "depth", "tokens")
    _bounds(cmds["max-processes"], "depth")

    gen = sub.add_parser("generate", help="write a seeded random net")
    gen.add_argument("--places", type=int, default=4)
    gen.add_argument("--transitions", type=int, default=3)
    gen.add_argument("--density", type=float, default=0.3)
    gen.add_argument("--max-weight", type=int, default=1)
    gen.add_argument("--max-tokens", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--kind", choices=["any", "structural", "one-safe"], default="any")
    gen.add_argument("--depth", type=int, default=8, help="bound for the structural/one-safe filters")
    gen.add_argument("--tokens", type=int, default=8)
    gen.add_argument("--out")

    th = sub.add_parser("properties", help="run the cross-checking property suites")
    th.add_argument("--seed", type=int, default=0)
    th.add_argument("--scale", type=float, default=1.0, help="multiply instance counts")
    th.add_argument("--witness-dir", help="write failing instances here as JSON")
    return parser


def _dispatch(argv: list[str], out: TextIO, err: TextIO) -> int:
    try:
        args = build_parser().parse_args(argv)
        for name in ("depth", "tokens", "gmax", "limit"):
            if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
                raise UsageError(f"--{name} must be non-negative")
        if args.command == "generate":
            return cmd_generate(args, out)
        if args.command == "properties":
            return cmd_properties(args, out)
        net = load_net(args.net)
        return NET_COMMANDS[args.command][0](args, net, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return USAGE
    except NetParseError as exc:
        for line in str(exc).splitlines():
            print(f"{getattr(args, 'net', '')}:{line}", file=err)
        return PARSE
    except ProcessError as exc:
        print(f"invalid process: {exc}", file=err)
        return USAGE


def run_command(argv: list[str]) -> CommandResult:
    out, err = io.StringIO(), io.StringIO()
    try:
        code = _dispatch(list(argv), out, err)
    except SystemExit as exc:  # --help
        code = exc.code if isinstance(exc.code, int) else OK
    return CommandResult(code, out.getvalue(), err.getvalue())


def main(argv: list[str] | None = None) -> int:
    try:
        return _dispatch(sys.argv[1:] if argv is None else list(argv), sys.stdout, sys.stderr)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else OK
