"""MCFG data model and text format.

A grammar is a set of nonterminals with fixed arities, a terminal alphabet,
and rules.  A rule's left-hand side is a nonterminal applied to argument
strings; each argument string mixes terminals with variables bound by the
right-hand side predicates.  A basic rule has an empty right-hand side and
all-terminal arguments.

The empty string is never a terminal: an epsilon argument is simply an empty
argument string.  The reserved token ``@eps`` names the epsilon edge label in
graph files and is excluded from every terminal alphabet.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import GrammarError, ParseError

EPSILON = "@eps"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_EPS_KEYWORD = "eps"
_START_KEYWORD = "start"


@dataclass(frozen=True, slots=True)
class Term:
    """One terminal occurrence inside an argument string."""

    token: str


@dataclass(frozen=True, slots=True)
class Var:
    """One variable occurrence inside an argument string."""

    name: str


ArgString = tuple  # tuple[Term | Var, ...]


@dataclass(frozen=True)
class Rule:
    """``lhs(lhs_args) <- rhs[0], rhs[1], ...``; empty rhs means basic rule."""

    lhs: str
    lhs_args: tuple[ArgString, ...]
    rhs: tuple[tuple[str, tuple[str, ...]], ...] = ()

    @property
    def is_basic(self) -> bool:
        return not self.rhs

    @property
    def length(self) -> int:
        """Rule length: RHS variable count plus LHS items."""
        return sum(len(a) for a in self.lhs_args) + sum(
            len(vs) for _, vs in self.rhs
        )

    def var_coords(self) -> dict[str, tuple[int, int]]:
        """Map each RHS variable name to its (predicate index, slot)."""
        coords: dict[str, tuple[int, int]] = {}
        for i, (_, vs) in enumerate(self.rhs):
            for j, v in enumerate(vs):
                coords[v] = (i, j)
        return coords

    def lhs_variables(self) -> list[str]:
        """Variable names in order of appearance across all LHS arguments."""
        out = []
        for arg in self.lhs_args:
            for item in arg:
                if isinstance(item, Var):
                    out.append(item.name)
        return out


@dataclass(frozen=True)
class Grammar:
    nonterminals: dict[str, int]  # name -> arity
    terminals: frozenset[str]
    rules: tuple[Rule, ...]
    start: str

    @property
    def dimension(self) -> int:
        return max(self.nonterminals.values(), default=0)

    @property
    def rank(self) -> int:
        return max((len(r.rhs) for r in self.rules), default=0)

    @property
    def size(self) -> int:
        return sum(r.length for r in self.rules)

    def arity(self, nt: str) -> int:
        return self.nonterminals[nt]


def make_grammar(start: str, rules: Iterable[Rule]) -> Grammar:
    """Build a grammar from rules, inferring arities and the alphabet.

    Duplicate rules are dropped (the rule set is a set).  Raises
    GrammarError on structural problems; see `validate` for the full list
    of checks.
    """
    deduped: list[Rule] = []
    seen = set()
    for r in rules:
        if r not in seen:
            seen.add(r)
            deduped.append(r)
    arities: dict[str, int] = {}
    terminals: set[str] = set()

    def record_arity(nt: str, k: int) -> None:
        old = arities.setdefault(nt, k)
        if old != k:
            raise GrammarError(f"{nt} used with arity {k} and {old}")

    for r in deduped:
        record_arity(r.lhs, len(r.lhs_args))
        for nt, vs in r.rhs:
            record_arity(nt, len(vs))
        for arg in r.lhs_args:
            for item in arg:
                if isinstance(item, Term):
                    if item.token == EPSILON:
                        raise GrammarError(f"{EPSILON} is not a terminal")
                    terminals.add(item.token)
    record_arity(start, 1)
    g = Grammar(arities, frozenset(terminals), tuple(deduped), start)
    problems = [v for v in validate(g) if not v.startswith("warning:")]
    if problems:
        raise GrammarError("; ".join(problems))
    return g


def validate(g: Grammar) -> list[str]:
    """Structural validation report.  Empty iff every invariant holds.

    Deleting and permuting rules are legal in the general model but are
    reported with a ``warning:`` prefix, since most of the toolchain
    (normalization, the reachability engine) requires their absence.
    """
    report: list[str] = []
    if g.start not in g.nonterminals:
        report.append(f"start symbol {g.start} undefined")
    elif g.nonterminals[g.start] != 1:
        report.append(f"start symbol {g.start} must have arity 1")
    for idx, r in enumerate(g.rules):
        where = f"rule {idx} ({r.lhs})"
        if g.nonterminals.get(r.lhs) != len(r.lhs_args):
            report.append(f"{where}: arity mismatch on LHS")
        rhs_vars: list[str] = []
        for nt, vs in r.rhs:
            if g.nonterminals.get(nt) != len(vs):
                report.append(f"{where}: arity mismatch on RHS {nt}")
            rhs_vars.extend(vs)
        if len(set(rhs_vars)) != len(rhs_vars):
            report.append(f"{where}: duplicate variable on RHS")
        used = r.lhs_variables()
        if len(set(used)) != len(used):
            report.append(f"{where}: variable used twice on LHS")
        unknown = [v for v in set(used) if v not in set(rhs_vars)]
        for v in sorted(unknown):
            report.append(f"{where}: unknown variable {v}")
        missing = [v for v in rhs_vars if v not in set(used)]
        for v in missing:
            report.append(f"warning: {where}: deleting rule (drops {v})")
        for _, vs in r.rhs:
            # variables of one predicate must keep their slot order
            order = [v for v in used if v in set(vs)]
            expected = [v for v in vs if v in set(used)]
            if order != expected:
                report.append(f"warning: {where}: permuting rule")
                break
    return report


@dataclass(frozen=True)
class GrammarFlags:
    non_deleting: bool
    non_permuting: bool
    dimension: int
    rank: int


def classify_flags(g: Grammar) -> GrammarFlags:
    """Compute the non-deleting / non-permuting flags plus dimension and rank."""
    report = validate(g)
    non_deleting = not any("deleting rule" in v for v in report)
    non_permuting = not any("permuting rule" in v for v in report)
    return GrammarFlags(non_deleting, non_permuting, g.dimension, g.rank)


# ---------------------------------------------------------------------------
# Text format
#
#   start S
#   S('0' x '1') <- S(x)        # production rule
#   S('0' '1')                  # basic rule
#   A(eps, eps)                 # epsilon arguments
#
# One declaration per line; '#' starts a comment; an argument is a
# space-separated juxtaposition of quoted terminals and bare variable
# identifiers, or the keyword `eps`.


class _LineLexer:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.lineno = lineno
        self.pos = 0

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.lineno, self.pos + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def try_consume(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected identifier")
        self.pos = m.end()
        return m.group()

    def quoted(self) -> str:
        self.skip_ws()
        assert self.text[self.pos] == "'"
        end = self.text.find("'", self.pos + 1)
        if end < 0:
            raise self.error("unterminated terminal")
        token = self.text[self.pos + 1 : end]
        if not token or any(c in " \t'" for c in token):
            raise self.error(f"bad terminal token {token!r}")
        if token == EPSILON:
            raise self.error(f"{EPSILON} is reserved and not a terminal")
        self.pos = end + 1
        return token

    def at_end(self) -> bool:
        return self.peek() == ""


def _parse_arg(lx: _LineLexer) -> ArgString:
    items: list[Term | Var] = []
    first = True
    while True:
        ch = lx.peek()
        if ch == "'":
            items.append(Term(lx.quoted()))
        elif ch and (ch.isalpha() or ch == "_"):
            name = lx.ident()
            if name == _EPS_KEYWORD:
                if not first or lx.peek() not in (",", ")"):
                    raise lx.error("eps must be the entire argument")
                return ()
            items.append(Var(name))
        else:
            break
        first = False
    if not items:
        raise lx.error("empty argument (use eps)")
    return tuple(items)


def _parse_rule(lx: _LineLexer, lhs: str) -> Rule:
    lx.expect("(")
    args = [_parse_arg(lx)]
    while lx.try_consume(","):
        args.append(_parse_arg(lx))
    lx.expect(")")
    rhs: list[tuple[str, tuple[str, ...]]] = []
    if not lx.at_end():
        lx.expect("<")
        lx.expect("-")
        while True:
            nt = lx.ident()
            lx.expect("(")
            vs = [lx.ident()]
            while lx.try_consume(","):
                vs.append(lx.ident())
            lx.expect(")")
            for v in vs:
                if v == _EPS_KEYWORD:
                    raise lx.error("eps is reserved and not a variable")
            rhs.append((nt, tuple(vs)))
            if not lx.try_consume(","):
                break
        if not lx.at_end():
            raise lx.error("trailing input after rule")
    return Rule(lhs, tuple(args), tuple(rhs))


def _strip_comment(line: str) -> str:
    """Drop a '#' comment, but not inside a quoted terminal."""
    in_quote = False
    for i, ch in enumerate(line):
        if ch == "'":
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
    return line


def parse_grammar(text: str) -> Grammar:
    """Parse a grammar document, returning a validated Grammar.

    Raises ParseError (with line/column) for syntax problems and
    GrammarError for structural ones (arity mismatch, duplicate variable,
    variable used twice on the LHS, unknown variable).
    """
    start: str | None = None
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        lx = _LineLexer(line, lineno)
        head = lx.ident()
        if head == _START_KEYWORD and lx.peek() != "(":
            start = lx.ident()
            if not lx.at_end():
                raise lx.error("trailing input after start declaration")
            continue
        rules.append(_parse_rule(lx, head))
    if start is None:
        raise ParseError("missing start declaration", 1, 1)
    try:
        return make_grammar(start, rules)
    except GrammarError:
        raise


def _format_arg(arg: ArgString) -> str:
    if not arg:
        return _EPS_KEYWORD
    parts = []
    for item in arg:
        if isinstance(item, Term):
            parts.append(f"'{item.token}'")
        else:
            parts.append(item.name)
    return " ".join(parts)


def format_rule(r: Rule) -> str:
    head = f"{r.lhs}({', '.join(_format_arg(a) for a in r.lhs_args)})"
    if r.is_basic:
        return head
    body = ", ".join(f"{nt}({', '.join(vs)})" for nt, vs in r.rhs)
    return f"{head} <- {body}"


def format_grammar(g: Grammar) -> str:
    """Emit the grammar document; parse_grammar round-trips it structurally."""
    lines = [f"start {g.start}"]
    lines.extend(format_rule(r) for r in g.rules)
    return "\n".join(lines) + "\n"


def rule_from_strings(
    lhs: str,
    lhs_args: Iterable[Iterable[str]],
    rhs: Iterable[tuple[str, Iterable[str]]] = (),
    variables: Iterable[str] = (),
) -> Rule:
    """Convenience constructor used by the generators: items that appear in
    `variables` (or that are bound on the given rhs) become Var, everything
    else Term."""
    rhs_t = tuple((nt, tuple(vs)) for nt, vs in rhs)
    var_names = set(variables)
    for _, vs in rhs_t:
        var_names.update(vs)
    args = tuple(
        tuple(Var(it) if it in var_names else Term(it) for it in arg)
        for arg in lhs_args
    )
    return Rule(lhs, args, rhs_t)
