"""Compilation of a normal-form grammar and a graph into the flat integer
form the saturation kernels run on.

Facts are packed into single integers: a fact A[(u1,v1),...,(uk,vk)] becomes
``base[A] + sum(digit_j * n**j)`` with digit order u1, v1, u2, v2, ...  The
per-nonterminal bases also give the theoretical fact-count ceiling
``sum_A n**(2*arity(A))``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..grammar import EPSILON, Grammar
from ..graphs import LabeledGraph
from ..normalform import T1, T2, T3, T4, T5, NormalGrammar

# occurrence tags shared with the kernels
OCC_T2, OCC_T3, OCC_T4, OCC_T5 = 2, 3, 4, 5
# justification tags
J_INIT, J_EPSL, J_EPSR, J_T2, J_T3, J_T4, J_T5 = 0, 1, 2, 3, 4, 5, 6


@dataclass
class T5Rule:
    lhs_nt: int
    rhs_nts: tuple[int, ...]
    # per LHS arg, the full ordered (pos, slot) sequence (witness stitching)
    arg_seqs: tuple[tuple[tuple[int, int], ...], ...]
    # per LHS arg: (first_pos, first_slot, last_pos, last_slot)
    ends: tuple[tuple[int, int, int, int], ...]
    # per RHS position: ((slot_v, slot_u), ...) meaning v[slot_v] == u[slot_u]
    internal: tuple[tuple[tuple[int, int], ...], ...]
    # cross-position constraints (posA, slotA, posB, slotB):
    # factA.v[slotA] == factB.u[slotB]
    cross: tuple[tuple[int, int, int, int], ...]
    # per RHS position: digit indices feeding the join key, in cross order
    keydigits: tuple[tuple[int, ...], ...]


@dataclass
class Program:
    nt_names: tuple[str, ...]
    arities: tuple[int, ...]
    start_nt: int
    labels: tuple[str, ...]  # labels[0] == EPSILON
    label_ids: dict[str, int]
    nt_base: tuple[int, ...]  # filled in against a graph size by bind()
    t1: tuple[tuple[int, int], ...]  # (label, nt)
    occs: tuple[tuple, ...]  # per nt, tuple of occurrence tuples
    t5rules: tuple[T5Rule, ...]
    source_rule_of_t5: tuple[int, ...]  # grammar rule index per t5 rule


def compile_grammar(ng: NormalGrammar) -> Program:
    g = ng.grammar
    nt_names = tuple(g.nonterminals)
    nt_ids = {nt: i for i, nt in enumerate(nt_names)}
    arities = tuple(g.nonterminals[nt] for nt in nt_names)
    labels = (EPSILON,) + tuple(sorted(g.terminals))
    label_ids = {lbl: i for i, lbl in enumerate(labels)}

    t1: list[tuple[int, int]] = []
    occs: list[list[tuple]] = [[] for _ in nt_names]
    t5rules: list[T5Rule] = []
    t5_src: list[int] = []

    for ridx, (rule, kind) in enumerate(zip(g.rules, ng.kinds)):
        lhs = nt_ids[rule.lhs]
        if isinstance(kind, T1):
            lbl = 0 if kind.token is None else label_ids[kind.token]
            t1.append((lbl, lhs))
            continue
        rhs0 = nt_ids[rule.rhs[0][0]]
        if isinstance(kind, T2):
            occs[rhs0].append((OCC_T2, lhs, kind.slot, label_ids[kind.token]))
        elif isinstance(kind, T3):
            occs[rhs0].append((OCC_T3, lhs, kind.slot, label_ids[kind.token]))
        elif isinstance(kind, T4):
            lbl = 0 if kind.token is None else label_ids[kind.token]
            occs[rhs0].append((OCC_T4, lhs, kind.pos, lbl))
        else:
            assert isinstance(kind, T5)
            rhs_nts = tuple(nt_ids[nt] for nt, _ in rule.rhs)
            ends = tuple(
                (seq[0][0], seq[0][1], seq[-1][0], seq[-1][1])
                for seq in kind.plan
            )
            internal: list[list[tuple[int, int]]] = [
                [] for _ in rhs_nts
            ]
            cross: list[tuple[int, int, int, int]] = []
            for seq in kind.plan:
                for (pa, sa), (pb, sb) in zip(seq, seq[1:]):
                    if pa == pb:
                        internal[pa].append((sa, sb))
                    else:
                        cross.append((pa, sa, pb, sb))
            keydigits: list[list[int]] = [[] for _ in rhs_nts]
            for pa, sa, pb, sb in cross:
                keydigits[pa].append(2 * sa + 1)  # v side
                keydigits[pb].append(2 * sb)  # u side
            rid = len(t5rules)
            t5rules.append(
                T5Rule(
                    lhs,
                    rhs_nts,
                    kind.plan,
                    ends,
                    tuple(tuple(c) for c in internal),
                    tuple(cross),
                    tuple(tuple(kd) for kd in keydigits),
                )
            )
            t5_src.append(ridx)
            for pos, nt in enumerate(rhs_nts):
                occs[nt].append((OCC_T5, rid, pos))

    return Program(
        nt_names,
        arities,
        nt_ids[g.start],
        labels,
        label_ids,
        (),
        tuple(t1),
        tuple(tuple(o) for o in occs),
        tuple(t5rules),
        tuple(t5_src),
    )


@dataclass
class GraphData:
    n: int
    radix: int
    nt_base: tuple[int, ...]
    fact_space: int  # sum over nonterminals of n**(2*arity)
    in_by: dict  # u * n_labels + label -> tuple of predecessors
    out_by: dict  # v * n_labels + label -> tuple of successors
    eps_in: tuple[tuple[int, ...], ...]
    eps_out: tuple[tuple[int, ...], ...]
    edges_by_label: tuple[tuple[tuple[int, int], ...], ...]
    closure: list | None  # bitset row per node, or None when pruning is off


def bind_graph(prog: Program, g: LabeledGraph, closure=None) -> GraphData:
    """Index an epsilon-augmented graph against a compiled grammar.

    Labels the grammar does not know are inert: they participate in plain
    reachability but never match a rule.
    """
    n = g.n
    nl = len(prog.labels)
    radix = max(n, 1)
    base: list[int] = []
    acc = 0
    for k in prog.arities:
        base.append(acc)
        acc += radix ** (2 * k)
    in_by: dict[int, list[int]] = {}
    out_by: dict[int, list[int]] = {}
    eps_in: list[list[int]] = [[] for _ in range(n)]
    eps_out: list[list[int]] = [[] for _ in range(n)]
    by_label: list[list[tuple[int, int]]] = [[] for _ in range(nl)]
    for u, lbl, v in sorted(g.edges):
        li = prog.label_ids.get(lbl, -1)
        if li < 0:
            continue
        in_by.setdefault(v * nl + li, []).append(u)
        out_by.setdefault(u * nl + li, []).append(v)
        by_label[li].append((u, v))
        if li == 0:
            eps_in[v].append(u)
            eps_out[u].append(v)
    return GraphData(
        n,
        radix,
        tuple(base),
        acc,
        {k: tuple(v) for k, v in in_by.items()},
        {k: tuple(v) for k, v in out_by.items()},
        tuple(tuple(x) for x in eps_in),
        tuple(tuple(x) for x in eps_out),
        tuple(tuple(e) for e in by_label),
        closure,
    )


def pack(gd: GraphData, nt: int, digits) -> int:
    code = 0
    for d in reversed(digits):
        code = code * gd.radix + d
    return gd.nt_base[nt] + code


def unpack(gd: GraphData, arities, code: int) -> tuple[int, list[int]]:
    nt = 0
    base = gd.nt_base
    for i in range(len(base) - 1, -1, -1):
        if code >= base[i]:
            nt = i
            break
    rem = code - base[nt]
    digits = []
    for _ in range(2 * arities[nt]):
        rem, d = divmod(rem, gd.radix)
        digits.append(d)
    return nt, digits
