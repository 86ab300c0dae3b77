"""Command line front end: ``alcomega <command> ...``.

Exit codes: decide and check-model use 0/1/2 for their answers; 64 usage,
65 malformed input, 66 unreadable file, 70 internal Conflict.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import syntax as sx
from .dltrans import UnknownName, translate_kb_T, translate_kb_Tneg
from .harness import roundtrip
from .hypersets import MembershipGraph, parse_equations, solve_equations, to_dot, transitive_closure
from .reasoner import Conflict, Entailed, NotEntailed, decide
from .search import SearchConfig, SearchConfigError
from .semantics import check_kb, check_query, dump_model, load_model
from .settrans import (
    UnsupportedQuery, emit_alc_theorem, emit_lc_theorem, encode_lc, to_sexp, to_tptp, translate_star,
)

EX_OK, EX_NO, EX_UNKNOWN = 0, 1, 2
EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_SOFTWARE = 64, 65, 66, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


def _read(path: str) -> str:
    data = Path(path).read_bytes()
    return data.decode("utf-8")


def _load_kb(path: str) -> sx.KnowledgeBase:
    return sx.parse_kb(_read(path))


def _queries(args) -> list:
    if args.query and args.query_file:
        raise UsageError("give --query or --query-file, not both")
    if args.query:
        return [sx.parse_query(args.query)]
    if args.query_file:
        qs = sx.parse_queries(_read(args.query_file))
        if not qs:
            raise UsageError(f"{args.query_file} holds no queries")
        return qs
    return []


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------


def cmd_translate(args) -> int:
    K = _load_kb(args.input)
    qs = _queries(args)
    F = qs[0] if qs else None
    target = args.to
    if target in ("alcoi", "alc-neg"):
        ctx = (translate_kb_T if target == "alcoi" else translate_kb_Tneg)(K, F)
        _write(sx.render(ctx.kb).rstrip("\n") + "\n", args.output)
        return EX_OK
    if target == "lc-omega":
        encoded, Fe = encode_lc(K, F)
        text = sx.render(encoded.kb).rstrip("\n") + "\n"
        if Fe is not None:
            text += f"# query\n{sx.render(Fe)}\n"
        _write(text, args.output)
        return EX_OK
    if F is None:
        raise UsageError(f"--to {target} needs a query (--query)")
    if target == "set-alc":
        phi = emit_alc_theorem(K, F)
    elif target == "set-lc":
        phi = emit_lc_theorem(K, F)
    else:
        phi = translate_star(K, F)
    text = to_tptp(phi) if args.format == "tptp" else to_sexp(phi, expand=args.expand_inter)
    _write(text.rstrip("\n") + "\n", args.output)
    return EX_OK


def _verdict_row(v) -> tuple[str, str, str]:
    if isinstance(v, Entailed):
        return "Entailed", v.source, f"closure={v.closure_size}"
    if isinstance(v, NotEntailed):
        return "NotEntailed", v.source, f"nodes={len(v.witness.pool)}"
    return "Unknown", "-", v.reason


def cmd_decide(args) -> int:
    K = _load_kb(args.input)
    qs = _queries(args)
    if not qs:
        raise UsageError("decide needs --query or --query-file")
    cfg = SearchConfig(max_domain=args.bound, mode=args.mode, seed=args.seed, time_budget=args.time_budget)
    if len(qs) > 1:
        if args.emit_witness:
            raise UsageError("--emit-witness takes a single query")
        print("query\tverdict\tsource\tdetail")
        for F in qs:
            print("\t".join((sx.render(F), *_verdict_row(decide(K, F, cfg)))))
        return EX_OK
    v = decide(K, qs[0], cfg)
    verdict, source, detail = _verdict_row(v)
    print(f"{verdict} ({source}; {detail})")
    if isinstance(v, Entailed):
        print(f"theoretical bound 2^{v.closure_size} (our filtration estimate); search bound {args.bound}")
        return EX_OK
    if isinstance(v, NotEntailed):
        if args.emit_witness:
            Path(args.emit_witness).write_text(dump_model(v.witness), encoding="utf-8")
        return EX_NO
    return EX_UNKNOWN


def cmd_check_model(args) -> int:
    I = load_model(_read(args.model))
    K = _load_kb(args.kb)
    report = check_kb(I, K)
    for v in report.verdicts:
        print(f"{'ok ' if v.ok else 'FAIL'}  {sx.render(v.axiom)}" + ("" if v.ok else f"  ({v.kind})"))
    ok = report.satisfied
    if args.query:
        holds = check_query(I, sx.parse_query(args.query))
        print(f"query {'holds' if holds else 'fails'}: {args.query}")
    return EX_OK if ok else EX_NO


def cmd_solve_sets(args) -> int:
    system = parse_equations(_read(args.equations))
    g, sol = solve_equations(system, keep_duplicates=args.keep_duplicates)
    print(f"well-founded: {'yes' if system.well_founded else 'no'}")
    for v in system.variables:
        node = sol[v]
        elems = ", ".join(sorted(g.label(m) for m in g.elements(node)))
        closure = ", ".join(sorted(g.label(m) for m in transitive_closure(g, node)))
        print(f"{v} = {{{elems}}}    TC({v}) = {{{closure}}}")
    if args.dot:
        Path(args.dot).write_text(to_dot(g), encoding="utf-8")
    return EX_OK


def _model_graph(I) -> MembershipGraph:
    edges = {(x, y) for x in I.pool for y in I.elems[x]}
    return MembershipGraph(tuple(I.pool), edges, {a: a for a in I.atoms})


def cmd_emit_dot(args) -> int:
    text = _read(args.input)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        g, _ = solve_equations(parse_equations(text))
    else:
        from .semantics import from_json
        g = _model_graph(from_json(data))
    _write(to_dot(g), args.output)
    return EX_OK


def cmd_roundtrip(args) -> int:
    K = _load_kb(args.kb) if args.kb else None
    summary = roundtrip(args.trials, args.seed, kb=K)
    print(f"{'trials' if K is not None else 'knowledge bases'}: {summary.trials}")
    print(f"sampled models: {summary.models}")
    print(f"ALCOI models collapsed: {summary.alcoi_models}")
    for f in summary.failures:
        print(f"FAIL {f}")
    print("PASS" if summary.ok else f"FAIL ({len(summary.failures)} problems)")
    return EX_OK if summary.ok else EX_NO


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="alcomega", description="ALC^Omega reasoning and translations")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_query(sp):
        sp.add_argument("--query", help="one query statement")
        sp.add_argument("--query-file", help="file with one or more queries")

    t = sub.add_parser("translate", help="translate a knowledge base")
    t.add_argument("input")
    t.add_argument("--to", required=True,
                   choices=["alcoi", "alc-neg", "lc-omega", "set-alc", "set-lc", "set-star"])
    t.add_argument("--format", choices=["sexp", "tptp"], default="sexp")
    t.add_argument("--expand-inter", action="store_true", help="write A cap B as A diff (A diff B)")
    t.add_argument("-o", "--output")
    add_query(t)
    t.set_defaults(func=cmd_translate)

    d = sub.add_parser("decide", help="decide entailment of a query")
    d.add_argument("input")
    add_query(d)
    d.add_argument("--mode", choices=["direct", "translated", "both"], default="both")
    d.add_argument("--bound", type=int, default=6)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--time-budget", type=int, default=None, help="milliseconds per solver call")
    d.add_argument("--emit-witness", metavar="MODEL_JSON")
    d.set_defaults(func=cmd_decide)

    c = sub.add_parser("check-model", help="check a model against a knowledge base")
    c.add_argument("model")
    c.add_argument("kb")
    c.add_argument("--query")
    c.set_defaults(func=cmd_check_model)

    s = sub.add_parser("solve-sets", help="solve a system of set equations")
    s.add_argument("equations")
    s.add_argument("--keep-duplicates", action="store_true")
    s.add_argument("--dot", help="also write the solution graph as DOT")
    s.set_defaults(func=cmd_solve_sets)

    e = sub.add_parser("emit-dot", help="DOT graph of a model or equation system")
    e.add_argument("input")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_emit_dot)

    r = sub.add_parser("roundtrip", help="translation round trips on random knowledge bases")
    r.add_argument("kb", nargs="?", help="check random models of this knowledge base instead")
    r.add_argument("--trials", type=int, default=200)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_roundtrip)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"alcomega: cannot read input: {exc}", file=sys.stderr)
        return EX_NOINPUT
    except Conflict as exc:
        print(f"alcomega: internal conflict: {exc}", file=sys.stderr)
        return EX_SOFTWARE
    except (UsageError, UnknownName, SearchConfigError, UnsupportedQuery, sx.DialectError) as exc:
        print(f"alcomega: {exc}", file=sys.stderr)
        return EX_USAGE
    except (sx.KBSyntaxError, ValueError, LookupError) as exc:
        print(f"alcomega: bad input: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
