"""Lower-bound gadget instances, used as correctness stress tests.

The orthogonal-vectors construction encodes k vector sets as a string and a
rank-1 grammar of dimension k/2 whose start symbol derives the string iff
some k-tuple of vectors is orthogonal.  The triangle construction reduces
triangle detection to single-pair reachability under {0^j 1^j}.
Brute-force oracles accompany both.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from .grammar import EPSILON, Grammar, Rule, make_grammar, rule_from_strings
from .graphs import LabeledGraph, graph_from_edges


@dataclass(frozen=True)
class OVInstance:
    k: int  # number of vector sets, even
    m: int  # vectors per set
    b: int  # vector width
    vectors: tuple  # k sets, each m tuples of b bits

    def __post_init__(self):
        if self.k < 2 or self.k % 2:
            raise ValueError("k must be even and >= 2")
        if len(self.vectors) != self.k or any(
            len(vs) != self.m for vs in self.vectors
        ):
            raise ValueError("vector table must be k x m")
        if any(len(v) != self.b for vs in self.vectors for v in vs):
            raise ValueError(f"all vectors must have width {self.b}")


def _sep(i: int) -> str:
    return f"|{i}{i + 1}"


def ov_grammar(k: int) -> Grammar:
    """The dimension-k/2, rank-1 grammar matching orthogonal vector tuples.

    Emitted literally as the rule-family products over the affix alphabets,
    one rule per affix assignment.
    """
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    d = k // 2
    markers = [f"#{i}" for i in range(1, k + 1)]
    grow_alphabet = [None, "0", "1", *markers]  # None encodes epsilon
    bits = ["0", "1"]
    rules: list[Rule] = []

    rules.append(
        rule_from_strings("A", [[_sep(2 * i + 1)] for i in range(d)])
    )

    def affix_rules(nt_from: str, nt_to: str, alphabet, mid=None, need_zero=False):
        xs = [f"x{j}" for j in range(1, d + 1)]
        for assign in product(alphabet, repeat=2 * d):
            s, t = assign[0::2], assign[1::2]
            if need_zero and not any(
                s[i] == "0" or t[i] == "0" for i in range(d)
            ):
                continue
            args = []
            for i in range(d):
                arg = []
                if s[i] is not None:
                    arg.append(s[i])
                if mid is not None:
                    arg.append(mid[i][0])
                arg.append(xs[i])
                if mid is not None:
                    arg.append(mid[i][1])
                if t[i] is not None:
                    arg.append(t[i])
                args.append(arg)
            rules.append(
                rule_from_strings(nt_to, args, [(nt_from, xs)])
            )

    # grow the seams in both directions over any terminal
    affix_rules("A", "A", grow_alphabet)
    # start matching vectors across each seam's markers, keeping a zero
    affix_rules(
        "A",
        "B",
        bits,
        mid=[(markers[2 * i], markers[2 * i + 1]) for i in range(d)],
        need_zero=True,
    )
    # extend the matched vectors coordinate by coordinate
    affix_rules("B", "B", bits, need_zero=True)
    # the first set's marker closes the matched vectors
    xs = [f"x{j}" for j in range(1, d + 1)]
    args = [[x] for x in xs]
    args[0] = ["#1"] + args[0]
    rules.append(rule_from_strings("C", args, [("B", xs)]))
    # grow arbitrarily to cover the whole template string
    affix_rules("C", "C", grow_alphabet)
    # concatenate the components
    rules.append(rule_from_strings("S", [xs], [("C", xs)]))
    return make_grammar("S", rules)


def ov_encode(inst: OVInstance) -> tuple[str, ...]:
    """The template string: odd sets reversed with trailing markers, even
    sets kept with leading markers, seam separators between odd/even sets."""
    tokens: list[str] = ["#1"]
    for i in range(1, inst.k + 1):
        vs = inst.vectors[i - 1]
        if i % 2:
            for v in vs:
                tokens.extend(str(bit) for bit in reversed(v))
                tokens.append(f"#{i}")
        else:
            for v in vs:
                tokens.append(f"#{i}")
                tokens.extend(str(bit) for bit in v)
        if i % 2:
            tokens.append(_sep(i))
    return tuple(tokens)


def ov_brute(inst: OVInstance) -> bool:
    """Try all m**k tuples for an orthogonal one."""
    for combo in product(*inst.vectors):
        if all(
            any(v[l] == 0 for v in combo) for l in range(inst.b)
        ):
            return True
    return False


def random_ov_instance(rng, k: int, m: int, b: int) -> OVInstance:
    vectors = tuple(
        tuple(tuple(rng.randint(0, 1) for _ in range(b)) for _ in range(m))
        for _ in range(k)
    )
    return OVInstance(k, m, b, vectors)


# ---------------------------------------------------------------------------
# Triangle freeness


@dataclass(frozen=True)
class TriangleInstance:
    """Undirected simple graph on nodes 1..n."""

    n: int
    edges: frozenset  # of (i, j) with i < j

    def __post_init__(self):
        for i, j in self.edges:
            if not (1 <= i < j <= self.n):
                raise ValueError(f"bad edge ({i}, {j})")

    def adjacent(self, i: int, j: int) -> bool:
        a, b = min(i, j), max(i, j)
        return (a, b) in self.edges


def triangle_grammar() -> Grammar:
    """{0^j 1^j : j >= 1}."""
    return make_grammar(
        "S",
        [
            rule_from_strings("S", [["0", "1"]]),
            rule_from_strings("S", [["0", "x", "1"]], [("S", ["x"])]),
        ],
    )


def triangle_instance(
    g: TriangleInstance,
) -> tuple[Grammar, LabeledGraph, str, str]:
    """The reachability gadget: v is reachable from u under {0^j 1^j} iff
    the input graph has a triangle.

    Four node copies per input node; the 0-chain descends the u-nodes, the
    1-chain returns along the z-nodes, and each input edge contributes the
    three epsilon layers u_i -> v_j, v_i -> y_j, y_i -> z_j (both
    orientations, the input being undirected).
    """
    n = g.n
    edges = []
    edges.append(("u", "0", "u1"))
    for i in range(1, n):
        edges.append((f"u{i}", "0", f"u{i + 1}"))
    for i in range(1, n):
        edges.append((f"z{i + 1}", "1", f"z{i}"))
    edges.append(("z1", "1", "v"))
    for a, b in sorted(g.edges):
        for i, j in ((a, b), (b, a)):
            edges.append((f"u{i}", EPSILON, f"v{j}"))
            edges.append((f"v{i}", EPSILON, f"y{j}"))
            edges.append((f"y{i}", EPSILON, f"z{j}"))
    nodes = ["u", "v"]
    for i in range(1, n + 1):
        nodes.extend((f"u{i}", f"v{i}", f"y{i}", f"z{i}"))
    return (
        triangle_grammar(),
        graph_from_edges(edges, pre_nodes=nodes),
        "u",
        "v",
    )


def triangle_brute(g: TriangleInstance) -> bool:
    for i, j in sorted(g.edges):
        for l in range(1, g.n + 1):
            if l != i and l != j and g.adjacent(i, l) and g.adjacent(j, l):
                return True
    return False


def random_triangle_instance(rng, n: int, p: float) -> TriangleInstance:
    edges = frozenset(
        (i, j)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        if rng.random() < p
    )
    return TriangleInstance(n, edges)


# ---------------------------------------------------------------------------
# File formats for the CLI


def parse_vectors_file(text: str) -> tuple:
    """0/1 rows, one vector per line, blank line between sets."""
    sets: list[list[tuple[int, ...]]] = [[]]
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            if sets[-1]:
                sets.append([])
            continue
        if not re.fullmatch(r"[01]+", line.replace(" ", "")):
            raise ValueError(f"bad vector row: {raw!r}")
        sets[-1].append(tuple(int(c) for c in line.replace(" ", "")))
    if sets and not sets[-1]:
        sets.pop()
    return tuple(tuple(s) for s in sets)


def ov_instance_from_sets(sets) -> OVInstance:
    k = len(sets)
    if k == 0:
        raise ValueError("no vector sets given")
    m = len(sets[0])
    b = len(sets[0][0]) if m else 0
    return OVInstance(k, m, b, tuple(tuple(map(tuple, s)) for s in sets))


def parse_undirected_graph(text: str) -> TriangleInstance:
    """One `i j` pair per line (1-based); '#' comments; self-loops rejected."""
    edges = set()
    n = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'i j'")
        i, j = int(parts[0]), int(parts[1])
        if i == j:
            raise ValueError(f"line {lineno}: self-loop {i}")
        edges.add((min(i, j), max(i, j)))
        n = max(n, i, j)
    return TriangleInstance(n, frozenset(edges))
