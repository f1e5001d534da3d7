"""The reachability solver around the saturation kernels.

`solve` runs the worklist algorithm: epsilon self-loops are added to the
graph, the worklist is seeded from the basic rules against matching edges,
and extracted facts are expanded along epsilon edges and every rule that
mentions their nonterminal, until fixpoint (or until the single requested
start fact appears).  Every derived fact records one producing step, from
which `extract_witness` rebuilds a concrete path.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..errors import BudgetError
from ..graphs import (
    ContractionMap,
    LabeledGraph,
    PathWitness,
    add_epsilon_selfloops,
    contract,
    plain_reachability,
    string_to_path_graph,
)
from ..normalform import NormalGrammar
from .kernels import get_kernel
from .program import GraphData, Program, bind_graph, compile_grammar

DEFAULT_FACT_BUDGET = 50_000_000


@dataclass
class EngineConfig:
    prune_with_plain_reachability: bool = True
    cycle_elimination: bool = False
    target: tuple[str, str] | None = None
    fact_budget: int = DEFAULT_FACT_BUDGET
    record_justifications: bool = True
    kernel: str | None = None  # None selects the compiled kernel if built
    # cycle elimination contracts pairs that the base grammar (typically the
    # d=1 insertion-closed family) certifies as mutually reachable; the
    # caller asserts the main grammar absorbs such cycles.
    cycle_base: NormalGrammar | None = None


@dataclass
class ReachResult:
    pairs: frozenset  # of (source name, target name)
    stats: dict
    target_hit: bool | None = None
    _prog: Program | None = field(default=None, repr=False)
    _gd: GraphData | None = field(default=None, repr=False)
    _graph: LabeledGraph | None = field(default=None, repr=False)
    _codes: list | None = field(default=None, repr=False)
    _justs: list | None = field(default=None, repr=False)


def _compiled(ng: NormalGrammar) -> Program:
    prog = getattr(ng, "_compiled_program", None)
    if prog is None:
        prog = compile_grammar(ng)
        object.__setattr__(ng, "_compiled_program", prog)
    return prog


def solve(
    ng: NormalGrammar, graph: LabeledGraph, cfg: EngineConfig | None = None
) -> ReachResult:
    """All-pairs (or single-pair, when cfg.target is set) reachability."""
    cfg = cfg or EngineConfig()
    if cfg.cycle_elimination:
        return solve_with_cycle_elimination(ng, graph, cfg)
    prog = _compiled(ng)
    aug = add_epsilon_selfloops(graph)
    closure = (
        plain_reachability(aug) if cfg.prune_with_plain_reachability else None
    )
    gd = bind_graph(prog, aug, closure)
    target_code = -1
    if cfg.target is not None:
        src, dst = cfg.target
        ids = aug.node_ids
        if src not in ids or dst not in ids:
            return ReachResult(frozenset(), {}, target_hit=False)
        target_code = (
            gd.nt_base[prog.start_nt] + ids[src] + ids[dst] * gd.radix
        )
    kern = get_kernel(cfg.kernel)
    limit = getattr(kern, "MAX_FACT_SPACE", None)
    if cfg.kernel is None and limit is not None and gd.fact_space > limit:
        kern = get_kernel("py")  # packing would overflow the compiled kernel
    codes, justs, stats, hit = kern.saturate(
        prog,
        gd,
        cfg.prune_with_plain_reachability,
        target_code,
        cfg.fact_budget,
        cfg.record_justifications,
    )
    stats["kernel"] = kern.KERNEL_NAME
    stats["fact_space"] = gd.fact_space
    pairs = _start_pairs(prog, gd, aug, codes)
    return ReachResult(
        frozenset(pairs),
        stats,
        target_hit=(hit if cfg.target is not None else None),
        _prog=prog,
        _gd=gd,
        _graph=aug,
        _codes=codes,
        _justs=justs,
    )


def _start_pairs(prog, gd, graph, codes):
    base = gd.nt_base[prog.start_nt]
    hi = base + gd.radix**2
    names = graph.node_names
    out = []
    for code in codes:
        if base <= code < hi:
            rem = code - base
            v, u = divmod(rem, gd.radix)
            out.append((names[u], names[v]))
    return out


def member(
    ng: NormalGrammar, w, kernel: str | None = None, fact_budget: int = DEFAULT_FACT_BUDGET
) -> bool:
    """Membership via the path-graph reduction with early exit."""
    graph, src, dst = string_to_path_graph(w)
    cfg = EngineConfig(
        target=(src, dst),
        record_justifications=False,
        kernel=kernel,
        fact_budget=fact_budget,
    )
    return bool(solve(ng, graph, cfg).target_hit)


def type5_join(rule, pos: int, fact_pairs, store: dict) -> list:
    """All facts a T5 rule derives from `fact_pairs` sitting at RHS
    position `pos`, joined against candidate facts of the other positions.

    `rule` is a (Rule, T5) pair or a compiled T5Rule; `store` maps each
    other position to its candidate pair-lists.  Every emitted fact
    satisfies the endpoint-matching condition, with the resulting pairs
    taken from each argument's first and last variable.
    """
    from itertools import product as _product

    from ..grammar import Rule as _Rule
    from ..normalform import T5 as _T5

    if isinstance(rule, tuple) and isinstance(rule[0], _Rule):
        plan = rule[1].plan
        npred = len(rule[0].rhs)
    else:
        plan = rule.arg_seqs
        npred = len(rule.rhs_nts)
    pools = []
    for q in range(npred):
        if q == pos:
            pools.append([tuple(map(tuple, fact_pairs))])
        else:
            pools.append([tuple(map(tuple, f)) for f in store.get(q, [])])
    out = []
    for combo in _product(*pools):
        ok = True
        for seq in plan:
            for (pa, sa), (pb, sb) in zip(seq, seq[1:]):
                if combo[pa][sa][1] != combo[pb][sb][0]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(
                tuple(
                    (combo[seq[0][0]][seq[0][1]][0], combo[seq[-1][0]][seq[-1][1]][1])
                    for seq in plan
                )
            )
    return out


def apply_pruning(pairs, closure) -> bool:
    """Keep a candidate fact iff each v_i plainly reaches u_{i+1}.

    `pairs` is the fact's [(u_1, v_1), ..., (u_k, v_k)] as node indices,
    `closure` the bitset rows of plain_reachability.
    """
    for (u_a, v_a), (u_b, v_b) in zip(pairs, pairs[1:]):
        if not (closure[v_a] >> u_b) & 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Witness extraction


def extract_witness(result: ReachResult, pair: tuple[str, str]) -> PathWitness:
    """Rebuild a concrete path for a derived start pair by walking the
    justification records bottom-up."""
    if result._justs is None:
        raise ValueError("run with record_justifications=True for witnesses")
    if pair not in result.pairs:
        raise KeyError(f"pair {pair} was not derived")
    prog, gd, graph = result._prog, result._gd, result._graph
    ids = graph.node_ids
    target_code = (
        gd.nt_base[prog.start_nt] + ids[pair[0]] + ids[pair[1]] * gd.radix
    )
    fact_idx = result._codes.index(target_code)
    paths = _paths_for(result, fact_idx)
    (start, end, edges) = paths[0]
    names = graph.node_names
    labels = prog.labels
    return PathWitness(
        names[start],
        names[end],
        tuple((names[u], labels[l], names[v]) for u, l, v in edges),
    )


def _decode(result: ReachResult, idx: int):
    from .program import unpack

    return unpack(result._gd, result._prog.arities, result._codes[idx])


def _paths_for(result: ReachResult, root: int):
    """Per-slot (start, end, edge list) tuples for a fact, resolving parents
    iteratively (parents always have smaller indices)."""
    justs = result._justs
    t5rules = result._prog.t5rules
    memo: dict[int, list] = {}
    stack = [root]
    while stack:
        idx = stack[-1]
        if idx in memo:
            stack.pop()
            continue
        rec = justs[idx]
        tag = rec[0]
        if tag == 0:
            _, lbl, u, v = rec
            edges = [] if (lbl == 0 and u == v) else [(u, lbl, v)]
            memo[idx] = [(u, v, edges)]
            stack.pop()
            continue
        if tag == 6:
            children = rec[2]
            pending = [c for c in children if c not in memo]
            if pending:
                stack.extend(pending)
                continue
            rule = t5rules[rec[1]]
            child_paths = [memo[c] for c in children]
            nt, digits = _decode(result, idx)
            out = []
            for a, seq in enumerate(rule.arg_seqs):
                # stitch the argument's variable sequence back together
                edges: list = []
                for p, s in seq:
                    edges.extend(child_paths[p][s][2])
                out.append((digits[2 * a], digits[2 * a + 1], edges))
            memo[idx] = out
            stack.pop()
            continue
        parent = rec[1]
        if parent not in memo:
            stack.append(parent)
            continue
        ppaths = memo[parent]
        nt, digits = _decode(result, idx)
        if tag == 1:  # epsilon edge prepended to slot's path
            _, _, slot, u2 = rec
            out = list(ppaths)
            s0, e0, ed = ppaths[slot]
            out[slot] = (u2, e0, ([] if u2 == s0 else [(u2, 0, s0)]) + ed)
        elif tag == 2:
            _, _, slot, v2 = rec
            out = list(ppaths)
            s0, e0, ed = ppaths[slot]
            out[slot] = (s0, v2, ed + ([] if v2 == e0 else [(e0, 0, v2)]))
        elif tag == 3:
            _, _, slot, lbl, u2 = rec
            out = list(ppaths)
            s0, e0, ed = ppaths[slot]
            out[slot] = (u2, e0, [(u2, lbl, s0)] + ed)
        elif tag == 4:
            _, _, slot, lbl, v2 = rec
            out = list(ppaths)
            s0, e0, ed = ppaths[slot]
            out[slot] = (s0, v2, ed + [(e0, lbl, v2)])
        else:  # tag == 5, a fresh slot from one edge
            _, _, pos, lbl, u, v = rec
            out = list(ppaths)
            edges = [] if (lbl == 0 and u == v) else [(u, lbl, v)]
            out.insert(pos, (u, v, edges))
        memo[idx] = out
        stack.pop()
    return memo[root]


# ---------------------------------------------------------------------------
# Cycle elimination


def cycle_eliminate(
    ng: NormalGrammar, graph: LabeledGraph, base: NormalGrammar
) -> tuple[LabeledGraph, ContractionMap]:
    """Contract node classes the base grammar deems mutually reachable.

    The caller asserts the main grammar's language absorbs strings of the
    base language (true for the insertion-closed Dyck approximation
    families); re-solve on the quotient and lift pairs through the map.
    """
    res = solve(
        base,
        graph,
        EngineConfig(record_justifications=False),
    )
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    pairs = res.pairs
    for u, v in pairs:
        if u != v and (v, u) in pairs:
            ru, rv = find(u), find(v)
            if ru != rv:
                # keep the lexicographically smallest name as representative
                lo, hi = sorted((ru, rv))
                parent[hi] = lo
    mapping = {}
    for name in graph.node_names:
        rep = find(name)
        if rep != name:
            mapping[name] = rep
    cmap = ContractionMap(mapping)
    return contract(graph, cmap), cmap


def solve_with_cycle_elimination(
    ng: NormalGrammar, graph: LabeledGraph, cfg: EngineConfig
) -> ReachResult:
    if cfg.cycle_base is None:
        raise ValueError("cycle_elimination requires cfg.cycle_base")
    quotient, cmap = cycle_eliminate(ng, graph, cfg.cycle_base)
    sub = replace(
        cfg,
        cycle_elimination=False,
        target=None,
        record_justifications=False,
    )
    qres = solve(ng, quotient, sub)
    qpairs = qres.pairs
    lifted = frozenset(
        (u, v)
        for u in graph.node_names
        for v in graph.node_names
        if (cmap.rep(u), cmap.rep(v)) in qpairs
    )
    stats = dict(qres.stats)
    stats["contracted_nodes"] = graph.n - quotient.n
    hit = None
    if cfg.target is not None:
        hit = cfg.target in lifted
    return ReachResult(lifted, stats, target_hit=hit)
