"""Batch command-line front end.

Exit codes: 0 success (and REACHABLE/MEMBER verdicts), 1 negative verdict,
2 usage or input errors, 3 budget exhaustion.  Diagnostics go to stderr;
all data output is deterministic, tab-separated plain text.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from .dyck import (
    DyckSpec,
    Variant,
    enumerate_interleaved,
    gen_dyck_cfg,
    gen_family,
)
from .engine import EngineConfig, extract_witness, member, solve
from .errors import BudgetError, GrammarError, ParseError
from .gadgets import (
    ov_encode,
    ov_grammar,
    ov_instance_from_sets,
    parse_undirected_graph,
    parse_vectors_file,
    triangle_instance,
)
from .grammar import Grammar, format_grammar, parse_grammar
from .graphs import format_graph, parse_graph
from .normalform import NormalGrammar, as_normal, is_normal_form, normalize
from .oracle import oracle_strings

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def _load_grammar(path: str) -> Grammar:
    return parse_grammar(_read(path))


def _ensure_normal(g: Grammar) -> NormalGrammar:
    if is_normal_form(g):
        return as_normal(g)
    print("note: grammar is not in normal form; normalizing", file=sys.stderr)
    return normalize(g)


def _dyck_spec_for_labels(labels) -> DyckSpec:
    pairs, brackets = set(), set()
    for lbl in labels:
        for prefix, bench in (("op", pairs), ("cp", pairs),
                              ("ob", brackets), ("cb", brackets)):
            if lbl.startswith(prefix) and lbl[len(prefix):].isdigit():
                bench.add(int(lbl[len(prefix):]))
    return DyckSpec(tuple(sorted(pairs)) or (1,), tuple(sorted(brackets)) or (1,))


def cmd_normalize(args) -> int:
    ng = normalize(_load_grammar(args.grammar))
    _write(args.output, format_grammar(ng.grammar))
    return EXIT_OK


def cmd_reach(args) -> int:
    if args.witness and args.cycle_elim:
        print(
            "error: --witness cannot be combined with --cycle-elim "
            "(witness paths live in the original graph)",
            file=sys.stderr,
        )
        return EXIT_USAGE
    ng = _ensure_normal(_load_grammar(args.grammar))
    graph = parse_graph(_read(args.graph))
    single = args.source is not None and args.target is not None
    cfg = EngineConfig(
        prune_with_plain_reachability=not args.no_prune,
        cycle_elimination=args.cycle_elim,
        target=(args.source, args.target) if single else None,
        record_justifications=args.witness,
    )
    if args.cycle_elim:
        cfg.cycle_base = normalize(
            gen_family(1, _dyck_spec_for_labels(graph.labels()), Variant.PLUS)
        )
    res = solve(ng, graph, cfg)
    if args.stats:
        for key in sorted(res.stats):
            print(f"{key}\t{res.stats[key]}", file=sys.stderr)
    if single:
        print("REACHABLE" if res.target_hit else "UNREACHABLE")
        if args.witness and res.target_hit:
            w = extract_witness(res, (args.source, args.target))
            print(f"{args.source}\t{args.target}\t{' '.join(w.label)}")
        return EXIT_OK if res.target_hit else EXIT_NEGATIVE
    for u, v in sorted(res.pairs):
        if args.witness:
            w = extract_witness(res, (u, v))
            print(f"{u}\t{v}\t{' '.join(w.label)}")
        else:
            print(f"{u}\t{v}")
    return EXIT_OK


def cmd_member(args) -> int:
    ng = _ensure_normal(_load_grammar(args.grammar))
    tokens = args.string.split()
    ok = member(ng, tokens)
    print("MEMBER" if ok else "NONMEMBER")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_gen_dyck(args) -> int:
    spec = DyckSpec.of(args.pairs)
    g = gen_family(args.dim, spec, Variant(args.variant))
    _write(args.output, format_grammar(g))
    return EXIT_OK


_COUNT_STATE: dict = {}


def _count_worker_init(grammar_text: str) -> None:
    _COUNT_STATE["ng"] = normalize(parse_grammar(grammar_text))


def _count_worker(batch) -> int:
    ng = _COUNT_STATE["ng"]
    return sum(1 for w in batch if member(ng, w))


def cmd_count(args) -> int:
    spec = DyckSpec.of(args.pairs)
    g = gen_family(args.dim, spec, Variant(args.variant))
    ng = normalize(g)
    lengths = range(2, args.max_len + 1, 2)
    if args.jobs <= 1:
        for L in lengths:
            n = sum(
                1 for w in enumerate_interleaved(spec, L) if member(ng, w)
            )
            print(f"{L}\t{n}")
        return EXIT_OK
    text = format_grammar(g)
    with ProcessPoolExecutor(
        max_workers=args.jobs,
        initializer=_count_worker_init,
        initargs=(text,),
    ) as pool:
        for L in lengths:
            words = list(enumerate_interleaved(spec, L))
            chunk = max(1, len(words) // (4 * args.jobs))
            batches = [
                words[i : i + chunk] for i in range(0, len(words), chunk)
            ]
            n = sum(pool.map(_count_worker, batches))
            print(f"{L}\t{n}")
    return EXIT_OK


def cmd_gadget_ov(args) -> int:
    sets = parse_vectors_file(_read(args.input))
    inst = ov_instance_from_sets(sets)
    if inst.k != args.k:
        print(
            f"error: vectors file has {inst.k} sets, --k says {args.k}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    _write(args.output + ".grammar", format_grammar(ov_grammar(inst.k)))
    _write(args.output + ".string", " ".join(ov_encode(inst)) + "\n")
    return EXIT_OK


def cmd_gadget_triangle(args) -> int:
    inst = parse_undirected_graph(_read(args.graph))
    g, graph, u, v = triangle_instance(inst)
    _write(args.output + ".grammar", format_grammar(g))
    _write(args.output + ".graph", format_graph(graph))
    _write(args.output + ".manifest", f"{u}\t{v}\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _load_grammar(args.grammar)
    strings = sorted(oracle_strings(g, args.max_len), key=lambda s: (len(s), s))
    for s in strings:
        print(" ".join(s) if s else "eps")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mcflreach",
        description="MCFL reachability toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("normalize", help="rewrite a grammar into normal form")
    q.add_argument("--grammar", required=True)
    q.add_argument("-o", "--output", required=True)
    q.set_defaults(func=cmd_normalize)

    q = sub.add_parser("reach", help="language reachability on a graph")
    q.add_argument("--grammar", required=True)
    q.add_argument("--graph", required=True)
    q.add_argument("--source")
    q.add_argument("--target")
    q.add_argument("--witness", action="store_true")
    q.add_argument("--no-prune", action="store_true")
    q.add_argument("--cycle-elim", action="store_true")
    q.add_argument("--stats", action="store_true")
    q.set_defaults(func=cmd_reach)

    q = sub.add_parser("member", help="string membership")
    q.add_argument("--grammar", required=True)
    q.add_argument("--string", required=True, help="space-separated tokens")
    q.set_defaults(func=cmd_member)

    q = sub.add_parser("gen-dyck", help="emit an approximation family grammar")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--pairs", type=int, default=1)
    q.add_argument("--variant", choices=["circ", "plus"], required=True)
    q.add_argument("-o", "--output", required=True)
    q.set_defaults(func=cmd_gen_dyck)

    q = sub.add_parser("count", help="strings per length accepted by a family")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--pairs", type=int, default=1)
    q.add_argument("--variant", choices=["circ", "plus"], required=True)
    q.add_argument("--max-len", type=int, required=True)
    q.add_argument("--jobs", type=int, default=1)
    q.set_defaults(func=cmd_count)

    q = sub.add_parser("gadget-ov", help="orthogonal-vectors gadget files")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--input", required=True, help="vectors file")
    q.add_argument("-o", "--output", required=True, help="output prefix")
    q.set_defaults(func=cmd_gadget_ov)

    q = sub.add_parser("gadget-triangle", help="triangle-freeness gadget files")
    q.add_argument("--graph", required=True, help="undirected edge list")
    q.add_argument("-o", "--output", required=True, help="output prefix")
    q.set_defaults(func=cmd_gadget_triangle)

    q = sub.add_parser("oracle", help="dump derivable start strings")
    q.add_argument("--grammar", required=True)
    q.add_argument("--max-len", type=int, required=True)
    q.set_defaults(func=cmd_oracle)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, GrammarError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
