"""Labeled directed graphs.

Nodes are interned names; edges are (src, label, dst) triples under set
semantics.  The reserved label ``@eps`` marks epsilon edges, which contribute
nothing to a path's label string.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

from .errors import ParseError
from .grammar import EPSILON


@dataclass(frozen=True)
class LabeledGraph:
    node_names: tuple[str, ...]
    edges: frozenset  # of (src_id, label, dst_id)

    @cached_property
    def node_ids(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.node_names)}

    @property
    def n(self) -> int:
        return len(self.node_names)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def max_degree(self) -> int:
        deg = [0] * self.n
        for u, _, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return max(deg, default=0)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[set[int]] = [set() for _ in range(self.n)]
        for u, _, v in self.edges:
            out[u].add(v)
        return tuple(tuple(sorted(s)) for s in out)

    def labels(self) -> set[str]:
        return {lbl for _, lbl, _ in self.edges}

    def named_edges(self) -> list[tuple[str, str, str]]:
        names = self.node_names
        return sorted(
            (names[u], lbl, names[v]) for u, lbl, v in self.edges
        )


def graph_from_edges(edge_triples, pre_nodes=()) -> LabeledGraph:
    """Build a graph from (src_name, label, dst_name) triples, interning
    node names in order of first appearance (pre_nodes first)."""
    names: list[str] = []
    ids: dict[str, int] = {}

    def intern(name: str) -> int:
        if name not in ids:
            ids[name] = len(names)
            names.append(name)
        return ids[name]

    for name in pre_nodes:
        intern(name)
    edges = set()
    for src, lbl, dst in edge_triples:
        edges.add((intern(src), lbl, intern(dst)))
    return LabeledGraph(tuple(names), frozenset(edges))


def parse_graph(text: str) -> LabeledGraph:
    """One edge per line: ``src label dst`` (whitespace-separated).

    ``#`` starts a comment; duplicate edges warn and are dropped.
    """
    triples = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(
                f"expected 'src label dst', got {len(parts)} fields",
                lineno,
                1,
            )
        triple = tuple(parts)
        if triple in seen:
            warnings.warn(f"duplicate edge on line {lineno}: {line}")
            continue
        seen.add(triple)
        triples.append(triple)
    return graph_from_edges(triples)


def format_graph(g: LabeledGraph) -> str:
    """Edge lines sorted by (src, label, dst); isolated nodes are emitted as
    self-comments so the node set round-trips."""
    lines = [f"{s} {l} {d}" for s, l, d in g.named_edges()]
    touched = {u for u, _, v in g.edges} | {v for u, _, v in g.edges}
    for i, name in enumerate(g.node_names):
        if i not in touched:
            lines.append(f"# node {name}")
    return "\n".join(lines) + ("\n" if lines else "")


def add_epsilon_selfloops(g: LabeledGraph) -> LabeledGraph:
    """Every node gains (v, eps, v); idempotent."""
    edges = set(g.edges)
    for v in range(g.n):
        edges.add((v, EPSILON, v))
    return LabeledGraph(g.node_names, frozenset(edges))


def plain_reachability(g: LabeledGraph) -> list[int]:
    """Reflexive-transitive closure, labels ignored, as n bitset rows.

    Row u has bit v set iff a (possibly empty) directed path u ~> v exists.
    Computed on the condensation: SCC members share a row.
    """
    n = g.n
    succ = g.successors
    comp = _tarjan_scc(succ, n)
    n_comp = max(comp, default=-1) + 1
    members: list[list[int]] = [[] for _ in range(n_comp)]
    for v, c in enumerate(comp):
        members[c].append(v)
    comp_succ: list[set[int]] = [set() for _ in range(n_comp)]
    for u in range(n):
        for v in succ[u]:
            if comp[u] != comp[v]:
                comp_succ[comp[u]].add(comp[v])
    # Tarjan numbers components in reverse topological order
    comp_row = [0] * n_comp
    for c in range(n_comp):
        row = 0
        for v in members[c]:
            row |= 1 << v
        for d in comp_succ[c]:
            row |= comp_row[d]
        comp_row[c] = row
    return [comp_row[comp[v]] for v in range(n)]


def _tarjan_scc(succ, n: int) -> list[int]:
    """Iterative Tarjan; returns component index per node, components
    numbered in reverse topological order."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            targets = succ[v]
            for i in range(pi, len(targets)):
                w = targets[i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
            work.pop()
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comp


def string_to_path_graph(w) -> tuple[LabeledGraph, str, str]:
    """The standard membership-to-reachability reduction: a chain graph
    spelling w, with source node "0" and target node str(len(w))."""
    w = tuple(w)
    if EPSILON in w:
        raise ValueError(f"{EPSILON} cannot appear in an input string")
    names = tuple(str(i) for i in range(len(w) + 1))
    edges = frozenset(
        (i, tok, i + 1) for i, tok in enumerate(w)
    )
    return LabeledGraph(names, edges), "0", str(len(w))


@dataclass(frozen=True)
class ContractionMap:
    """Surjection node name -> representative name, idempotent on
    representatives; unmapped names represent themselves."""

    mapping: dict[str, str]

    def __post_init__(self):
        for rep in self.mapping.values():
            if self.mapping.get(rep, rep) != rep:
                raise ValueError(f"representative {rep} is itself mapped")

    def rep(self, name: str) -> str:
        return self.mapping.get(name, name)


def contract(g: LabeledGraph, cmap: ContractionMap) -> LabeledGraph:
    """Quotient graph: edges re-targeted to representatives, duplicates
    (including collapsed epsilon self-loops) deduped."""
    kept_names = []
    seen = set()
    for name in g.node_names:
        rep = cmap.rep(name)
        if rep not in seen:
            seen.add(rep)
            kept_names.append(rep)
    triples = [
        (cmap.rep(g.node_names[u]), lbl, cmap.rep(g.node_names[v]))
        for u, lbl, v in g.edges
    ]
    return graph_from_edges(triples, pre_nodes=kept_names)


@dataclass(frozen=True)
class PathWitness:
    """A concrete path: ordered edge triples over node names.

    The label string drops epsilon edges.  An empty edge list is the empty
    path at ``source`` (== ``target``).
    """

    source: str
    target: str
    edges: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        at = self.source
        for u, _, v in self.edges:
            if u != at:
                raise ValueError("edges do not form a path")
            at = v
        if at != self.target:
            raise ValueError("path does not end at target")

    @property
    def label(self) -> tuple[str, ...]:
        return tuple(l for _, l, _ in self.edges if l != EPSILON)
