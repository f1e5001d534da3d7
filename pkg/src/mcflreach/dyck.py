"""Interleaved-Dyck machinery: the approximation grammar families, a
two-scan ground-truth oracle, an enumerator of the interleaved universe,
and the language-size counter.

Token scheme: parenthesis pair i is op<i>/cp<i>, bracket pair i is
ob<i>/cb<i>.  Pair indices may be any positive integers, so graphs with
labels like op10/cp10 work directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .grammar import Grammar, Rule, make_grammar, rule_from_strings
from .normalform import NormalGrammar, normalize


@dataclass(frozen=True)
class DyckSpec:
    """Alphabets of the two interleaved Dyck languages.

    `pairs` and `brackets` are the index sets of the parenthesis and bracket
    pairs; an int k abbreviates 1..k.
    """

    pairs: tuple[int, ...]
    brackets: tuple[int, ...]

    @staticmethod
    def of(k: int, l: int | None = None) -> "DyckSpec":
        return DyckSpec(
            tuple(range(1, k + 1)),
            tuple(range(1, (k if l is None else l) + 1)),
        )

    def paren_tokens(self) -> list[tuple[str, str]]:
        return [(f"op{i}", f"cp{i}") for i in self.pairs]

    def bracket_tokens(self) -> list[tuple[str, str]]:
        return [(f"ob{i}", f"cb{i}") for i in self.brackets]

    def alphabet(self) -> list[str]:
        out = []
        for o, c in self.paren_tokens() + self.bracket_tokens():
            out.extend((o, c))
        return out


class Variant(str, Enum):
    CIRC = "circ"
    PLUS = "plus"


def gen_dyck_cfg(k: int) -> Grammar:
    """Plain balanced-parentheses CFG over op<i>/cp<i>, i in [k]."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rules = [rule_from_strings("S", [[]])]
    for i in range(1, k + 1):
        rules.append(
            rule_from_strings(
                "S", [[f"op{i}", "x", f"cp{i}"]], [("S", ["x"])]
            )
        )
    rules.append(
        rule_from_strings("S", [["x1", "x2"]], [("S", ["x1"]), ("S", ["x2"])])
    )
    return make_grammar("S", rules)


def _family_rules(
    pred: str, pairs: list[tuple[str, str]], d: int
) -> list[Rule]:
    """Rules making pred^c recognize c-way splits of one Dyck language."""
    rules = []
    p = lambda c: f"{pred}{c}"
    # basic epsilon tuples for every arity
    for c in range(1, d + 1):
        rules.append(rule_from_strings(p(c), [[]] * c))
    # wrap: open before the first component, close after the last
    for c in range(1, d + 1):
        xs = [f"x{j}" for j in range(1, c + 1)]
        for o, cl in pairs:
            args = [[x] for x in xs]
            args[0] = [o] + args[0]
            args[-1] = args[-1] + [cl]
            rules.append(
                rule_from_strings(p(c), args, [(p(c), xs)])
            )
    # concatenation joining the seam components: a + b = c + 1
    for c in range(1, d + 1):
        for a in range(1, d + 1):
            b = c + 1 - a
            if not 1 <= b <= d:
                continue
            xs = [f"x{j}" for j in range(1, a + 1)]
            ys = [f"y{j}" for j in range(1, b + 1)]
            args = [[x] for x in xs[:-1]] + [[xs[-1], ys[0]]] + [
                [y] for y in ys[1:]
            ]
            rules.append(
                rule_from_strings(p(c), args, [(p(a), xs), (p(b), ys)])
            )
    return rules


def gen_family(d: int, spec: DyckSpec, variant: Variant | str) -> Grammar:
    """The d-dimensional rank-2 underapproximation grammar.

    The circ variant keeps parentheses and brackets in separate predicates;
    plus adds insertion (absorb a start-derivable string at a component
    edge) and nesting (enclose a component in an arity-2 tuple) rules.
    """
    variant = Variant(variant)
    if d < 1:
        raise ValueError("d must be >= 1")
    rules: list[Rule] = []
    rules += _family_rules("P", spec.paren_tokens(), d)
    rules += _family_rules("Q", spec.bracket_tokens(), d)
    # interleave the d parts of each language, either one leading
    xs = [f"x{j}" for j in range(1, d + 1)]
    ys = [f"y{j}" for j in range(1, d + 1)]
    inter1 = [tok for pair in zip(xs, ys) for tok in pair]
    inter2 = [tok for pair in zip(ys, xs) for tok in pair]
    rules.append(
        rule_from_strings("S", [inter1], [("P" + str(d), xs), ("Q" + str(d), ys)])
    )
    rules.append(
        rule_from_strings("S", [inter2], [("P" + str(d), xs), ("Q" + str(d), ys)])
    )
    if variant is Variant.PLUS:
        for pred in ("P", "Q"):
            for c in range(1, d + 1):
                vs = [f"x{j}" for j in range(1, c + 1)]
                for i in range(c):
                    before = [
                        ["y"] + [vs[i]] if j == i else [vs[j]]
                        for j in range(c)
                    ]
                    after = [
                        [vs[i]] + ["y"] if j == i else [vs[j]]
                        for j in range(c)
                    ]
                    rules.append(
                        rule_from_strings(
                            f"{pred}{c}",
                            before,
                            [(f"{pred}{c}", vs), ("S", ["y"])],
                        )
                    )
                    rules.append(
                        rule_from_strings(
                            f"{pred}{c}",
                            after,
                            [(f"{pred}{c}", vs), ("S", ["y"])],
                        )
                    )
        if d >= 2:
            # nesting: any component may be enclosed by an arity-2 tuple of
            # the other language, and the whole tuple by one of its own
            for pred, other in (("P", "Q"), ("Q", "P")):
                for c in range(1, d + 1):
                    vs = [f"x{j}" for j in range(1, c + 1)]
                    for i in range(c):
                        args = [
                            ["y1"] + [vs[i]] + ["y2"] if j == i else [vs[j]]
                            for j in range(c)
                        ]
                        rules.append(
                            rule_from_strings(
                                f"{pred}{c}",
                                args,
                                [(f"{pred}{c}", vs), (f"{other}2", ["y1", "y2"])],
                            )
                        )
                    args = [[v] for v in vs]
                    args[0] = ["y1"] + args[0]
                    args[-1] = args[-1] + ["y2"]
                    rules.append(
                        rule_from_strings(
                            f"{pred}{c}",
                            args,
                            [(f"{pred}{c}", vs), (f"{pred}2", ["y1", "y2"])],
                        )
                    )
    return make_grammar("S", rules)


def interleaved_oracle(w: Sequence[str], spec: DyckSpec) -> bool:
    """True iff both the parenthesis and the bracket projection balance."""
    openers = {f"op{i}": f"cp{i}" for i in spec.pairs}
    openers.update({f"ob{i}": f"cb{i}" for i in spec.brackets})
    closers = set(openers.values())
    pstack: list[str] = []
    bstack: list[str] = []
    for tok in w:
        if tok in openers:
            (pstack if tok.startswith("op") else bstack).append(openers[tok])
        elif tok in closers:
            stack = pstack if tok.startswith("cp") else bstack
            if not stack or stack.pop() != tok:
                return False
        else:
            return False
    return not pstack and not bstack


def enumerate_interleaved(spec: DyckSpec, length: int) -> Iterator[tuple]:
    """Exactly the interleaved-Dyck strings of the given length, in
    lexicographic token order, generated by stack-pruned search rather than
    raw alphabet enumeration."""
    if length < 0 or length % 2:
        return
    alphabet = spec.alphabet()
    openers = {f"op{i}": f"cp{i}" for i in spec.pairs}
    openers.update({f"ob{i}": f"cb{i}" for i in spec.brackets})
    closers = set(openers.values())

    prefix: list[str] = []
    pstack: list[str] = []
    bstack: list[str] = []

    def rec(remaining: int):
        if remaining == 0:
            yield tuple(prefix)
            return
        if len(pstack) + len(bstack) > remaining:
            return
        for tok in alphabet:
            if tok in openers:
                stack = pstack if tok.startswith("op") else bstack
                if len(pstack) + len(bstack) + 1 > remaining - 1:
                    continue
                stack.append(openers[tok])
            else:
                stack = pstack if tok.startswith("cp") else bstack
                if not stack or stack[-1] != tok:
                    continue
                stack.pop()
            prefix.append(tok)
            yield from rec(remaining - 1)
            prefix.pop()
            if tok in closers:
                stack.append(tok)
            else:
                stack.pop()
    yield from rec(length)


def count_in_language(
    g: Grammar | NormalGrammar,
    spec: DyckSpec,
    length: int,
    kernel: str | None = None,
) -> int:
    """How many interleaved-Dyck strings of the given length the grammar
    accepts, counted by running the engine on each enumerated candidate."""
    from .engine import member

    ng = g if isinstance(g, NormalGrammar) else normalize(g)
    return sum(
        1
        for w in enumerate_interleaved(spec, length)
        if member(ng, w, kernel=kernel)
    )
