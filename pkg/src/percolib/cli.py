"""percolib command line: run, search, verify, bound.

Exit codes: 0 success, 1 input error, 2 limit/config error,
3 verification counterexample.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import random
import sys
from fractions import Fraction
from math import comb

from .canon import CanonLimitError
from .hypergraph import FormatError, KGraph, parse_kgraph, sniff_format
from .pattern import Pattern, PatternError, builtin_pattern, is_builtin
from .process import TraceError, run_process, trace_document, trace_from_document
from .search import SearchLimitError, TauCache, exhaustive_max_time, heuristic_max_time
from .turan import (
    DensitySourceError,
    TuranLimitError,
    bound_document,
    default_density,
    finite_n_upper_proxy,
    running_time_bound,
    user_density,
)
from .verify import ClaimReport, verify_structural_claims

log = logging.getLogger("percolib")

EXIT_OK, EXIT_INPUT, EXIT_LIMIT, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3


class InputError(Exception):
    pass


class LimitError(Exception):
    pass


def load_pattern(source: str, removed: int | None = None, need_removed: bool = False) -> Pattern:
    if is_builtin(source):
        F = builtin_pattern(source)
    else:
        try:
            with open(source) as fh:
                G = parse_kgraph(fh.read(), "hyperlist")
        except OSError as exc:
            raise InputError(f"cannot read pattern {source!r}: {exc}") from exc
        F = Pattern(G, name=os.path.basename(source))
    if removed is not None:
        edges = sorted(F.graph.edges)
        if not 0 <= removed < len(edges):
            raise InputError(f"--removed-edge {removed} out of range 0..{len(edges) - 1}")
        return F.with_removed_edge(edges[removed])
    return F.with_removed_edge() if need_removed else F


def read_graph(path: str, fmt: str) -> KGraph:
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from exc
    if fmt == "auto":
        fmt = sniff_format(text)
    return parse_kgraph(text, fmt)


def emit(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# commands ------------------------------------------------------------------


def cmd_run(args: argparse.Namespace) -> int:
    F = load_pattern(args.pattern, args.removed_edge)
    H = read_graph(args.input, args.format)
    if H.k != F.k:
        raise InputError(f"input graph is {H.k}-uniform but the pattern is {F.k}-uniform")
    trace = run_process(F, H, args.engine)
    emit(trace_document(trace), args.output)
    print(f"tau={trace.tau} rounds={[len(r) for r in trace.rounds]}", file=sys.stderr)
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    F = load_pattern(args.pattern, args.removed_edge)
    cache = TauCache(args.cache or os.environ.get("PERCOLIB_CACHE"))
    if args.exhaustive:
        limits = {F.k: args.max_n} if args.max_n is not None else None
        try:
            report = exhaustive_max_time(F, args.n, cache=cache, limits=limits)
        except SearchLimitError as exc:
            raise LimitError(str(exc)) from exc
    else:
        report = heuristic_max_time(F, args.n, args.budget, seed=args.seed, cache=cache)
    emit(report.document(), args.output)
    print(
        f"best_tau={report.best_tau} method={report.method} examined={report.examined} "
        f"evaluations={report.evaluations}",
        file=sys.stderr,
    )
    return EXIT_OK


def _random_start(n: int, k: int, rng: random.Random) -> KGraph:
    p = rng.uniform(0.05, 0.5)
    return KGraph(n, k, frozenset(e for e in itertools.combinations(range(n), k) if rng.random() < p))


def cmd_verify(args: argparse.Namespace) -> int:
    policies = ["lex_min", "seeded"] if args.witness_policy == "both" else [args.witness_policy]
    if args.trace:
        try:
            with open(args.trace) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read trace {args.trace!r}: {exc}") from exc
        trace = trace_from_document(doc)
        F = trace.pattern
        if args.removed_edge is not None or F.removed_edge is None:
            idx = args.removed_edge
            F = F.with_removed_edge(sorted(F.graph.edges)[idx] if idx is not None else None)
        traces = [trace]
    else:
        if args.pattern is None or args.n is None:
            raise InputError("verify needs --trace, or --pattern and --n")
        F = load_pattern(args.pattern, args.removed_edge, need_removed=True)
        rng = random.Random(args.seed)
        traces = [run_process(F, _random_start(args.n, F.k, rng), args.engine) for _ in range(args.trials)]
    total = ClaimReport(F.label, 0)
    for t, trace in enumerate(traces):
        for pol in policies:
            rep = verify_structural_claims(
                trace, F, witness_policy=pol, seed=args.seed + t,
                copy_cap=args.copy_cap, completion_policy=args.completion_policy,
            )
            for c in rep.counterexamples:
                c["trial"] = t
                c["witness_policy"] = pol
            total.merge(rep)
    doc = total.document()
    doc["removed_edge"] = list(F.removed_edge)
    doc["trials"] = len(traces)
    doc["witness_policies"] = policies
    emit(doc, args.output)
    print(
        f"removed_edge={list(F.removed_edge)} trials={len(traces)} "
        f"counterexamples={len(total.counterexamples)}",
        file=sys.stderr,
    )
    return EXIT_OK if total.ok else EXIT_COUNTEREXAMPLE


def cmd_bound(args: argparse.Namespace) -> int:
    F = load_pattern(args.pattern, args.removed_edge, need_removed=True)
    try:
        if args.density is not None:
            source = user_density(Fraction(args.density))
        elif args.proxy_m is not None:
            source = finite_n_upper_proxy(F.minus_edge(), args.proxy_m)
        else:
            source = default_density(F)
    except (DensitySourceError, TuranLimitError) as exc:
        raise LimitError(str(exc)) from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    doc = bound_document(F, args.n[0], source)
    doc.pop("n")
    doc.pop("leading_term")
    rows = []
    for n in args.n:
        row = {"n": n, "binom": comb(n, F.k), "leading_term": _frac(running_time_bound(F, n, source))}
        if args.compare:
            rep = heuristic_max_time(F, n, args.budget, seed=args.seed)
            ratio = Fraction(rep.best_tau, comb(n, F.k))
            row.update(
                best_tau=rep.best_tau,
                ratio=_frac(ratio),
                ratio_float=round(float(ratio), 6),
                density_float=round(float(source.value), 6),
            )
        rows.append(row)
    doc["rows"] = rows
    if args.compare:
        doc["compare"] = {"method": "heuristic", "budget": args.budget, "seed": args.seed}
    emit(doc, args.output)
    print(f"density={_frac(source.value)} ({source.kind})", file=sys.stderr)
    for row in rows:
        extra = f" best_tau={row['best_tau']} ratio={row['ratio_float']}" if args.compare else ""
        print(f"n={row['n']} leading_term={row['leading_term']}{extra}", file=sys.stderr)
    return EXIT_OK


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="percolib", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def pattern_args(sp: argparse.ArgumentParser, required: bool = True) -> None:
        sp.add_argument("--pattern", required=required,
                        help="builtin K{t}, K{t}^{k}, C{t}, or a hyperlist file")
        sp.add_argument("--removed-edge", type=int, default=None,
                        help="index into the sorted pattern edges (default: smallest edge)")
        sp.add_argument("--output", "-o", default=None, help="JSON output path (default stdout)")

    sp = sub.add_parser("run", help="simulate one F-process")
    pattern_args(sp)
    sp.add_argument("--input", required=True, help="start graph file, or - for stdin")
    sp.add_argument("--format", choices=["auto", "graph6", "hyperlist"], default="auto")
    sp.add_argument("--engine", choices=["naive", "incremental"], default="incremental")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("search", help="search for the maximum running time M_F(n)")
    pattern_args(sp)
    sp.add_argument("--n", type=int, required=True)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--heuristic", action="store_true")
    sp.add_argument("--budget", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-n", type=int, default=None, help="override the exhaustive n limit")
    sp.add_argument("--cache", default=None, help="tau cache file (env PERCOLIB_CACHE)")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("verify", help="check the structural claims on process traces")
    pattern_args(sp, required=False)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trace", default=None, help="verify a trace JSON file instead of random starts")
    sp.add_argument("--engine", choices=["naive", "incremental"], default="incremental")
    sp.add_argument("--witness-policy", choices=["lex_min", "seeded", "both"], default="both")
    sp.add_argument("--completion-policy", choices=["lex_min", "seeded"], default="lex_min")
    sp.add_argument("--copy-cap", type=int, default=200_000)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bound", help="leading term of the running-time upper bound")
    pattern_args(sp)
    sp.add_argument("--n", type=int, nargs="+", required=True)
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--density", default=None, help="user-supplied density p/q for F - e")
    src.add_argument("--proxy-m", type=int, default=None, help="use ex(m, F-e)/C(m,k) as density")
    sp.add_argument("--compare", action="store_true", help="also run the heuristic search")
    sp.add_argument("--budget", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_bound)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InputError, FormatError, PatternError, TraceError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (LimitError, CanonLimitError, SearchLimitError, TuranLimitError, DensitySourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
