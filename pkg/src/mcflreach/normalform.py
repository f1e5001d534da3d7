"""Normal form for MCFGs.

A grammar is in normal form when it is non-deleting, non-permuting, and every
rule has one of five shapes:

  T1  A(a)                          a terminal or epsilon
  T2  A(x1,..,a xi,..,xk) <- B(..)  prepend one terminal to one slot
  T3  A(x1,..,xi a,..,xk) <- B(..)  append one terminal to one slot
  T4  A(x1,..,a,..,xk)    <- B(..)  start a fresh slot with a terminal or eps
  T5  A(s1,..,sk) <- B1(..),..,Bl(..)   every si a nonempty variable string

The reachability engine dispatches on these shapes.  `normalize` rewrites any
non-deleting, non-permuting grammar into normal form without changing its
language, dimension, or rank.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotNormalizableError
from .grammar import Grammar, Rule, Term, Var, classify_flags, make_grammar


@dataclass(frozen=True)
class T1:
    token: str | None  # None encodes epsilon


@dataclass(frozen=True)
class T2:
    slot: int
    token: str


@dataclass(frozen=True)
class T3:
    slot: int
    token: str


@dataclass(frozen=True)
class T4:
    pos: int  # new slot is inserted before this LHS index
    token: str | None


@dataclass(frozen=True)
class T5:
    # per LHS argument, the ordered (predicate index, slot) pairs it joins
    plan: tuple[tuple[tuple[int, int], ...], ...]


NormalRuleKind = T1 | T2 | T3 | T4 | T5


def classify_rule(rule: Rule) -> NormalRuleKind | None:
    """The unique normal-form shape of a rule, or None."""
    if rule.is_basic:
        if len(rule.lhs_args) != 1:
            return None
        arg = rule.lhs_args[0]
        if len(arg) == 0:
            return T1(None)
        if len(arg) == 1 and isinstance(arg[0], Term):
            return T1(arg[0].token)
        return None

    coords = rule.var_coords()
    if len(rule.rhs) == 1:
        _, vs = rule.rhs[0]
        k = len(vs)
        args = rule.lhs_args
        if len(args) == k:
            # all slots single variables in order, except one carrying a terminal
            special = [
                i
                for i, a in enumerate(args)
                if not (len(a) == 1 and isinstance(a[0], Var))
            ]
            if len(special) == 1:
                i = special[0]
                rest_ok = all(
                    args[j] == (Var(vs[j]),) for j in range(k) if j != i
                )
                a = args[i]
                if rest_ok and len(a) == 2:
                    if isinstance(a[0], Term) and a[1] == Var(vs[i]):
                        return T2(i, a[0].token)
                    if a[0] == Var(vs[i]) and isinstance(a[1], Term):
                        return T3(i, a[1].token)
                return None
        if len(args) == k + 1:
            special = [
                i
                for i, a in enumerate(args)
                if not (len(a) == 1 and isinstance(a[0], Var))
            ]
            if len(special) == 1:
                i = special[0]
                a = args[i]
                vars_in_order = [x for x in vs]
                rest = [args[j] for j in range(k + 1) if j != i]
                rest_ok = all(
                    r == (Var(v),) for r, v in zip(rest, vars_in_order)
                ) and len(rest) == k
                if rest_ok:
                    if len(a) == 0:
                        return T4(i, None)
                    if len(a) == 1 and isinstance(a[0], Term):
                        return T4(i, a[0].token)
            return None

    # T5: every argument a nonempty pure-variable string
    plan = []
    for arg in rule.lhs_args:
        if not arg or not all(isinstance(it, Var) for it in arg):
            return None
        plan.append(tuple(coords[it.name] for it in arg))
    return T5(tuple(plan))


@dataclass(frozen=True)
class NormalGrammar:
    grammar: Grammar
    kinds: tuple[NormalRuleKind, ...]
    # nonterminal -> [(rule index, RHS position)] over all rule occurrences
    occurrences: dict[str, tuple[tuple[int, int], ...]]

    @property
    def start(self) -> str:
        return self.grammar.start


def is_normal_form(g: Grammar) -> bool:
    flags = classify_flags(g)
    if not (flags.non_deleting and flags.non_permuting):
        return False
    return all(classify_rule(r) is not None for r in g.rules)


def _build_occurrences(g: Grammar) -> dict[str, tuple[tuple[int, int], ...]]:
    occ: dict[str, list[tuple[int, int]]] = {nt: [] for nt in g.nonterminals}
    for idx, r in enumerate(g.rules):
        for pos, (nt, _) in enumerate(r.rhs):
            occ[nt].append((idx, pos))
    return {nt: tuple(v) for nt, v in occ.items()}


def as_normal(g: Grammar) -> NormalGrammar:
    """Wrap a grammar already in normal form."""
    kinds = []
    for r in g.rules:
        kind = classify_rule(r)
        if kind is None:
            raise NotNormalizableError(f"rule not in normal form: {r}")
        kinds.append(kind)
    flags = classify_flags(g)
    if not flags.non_deleting:
        raise NotNormalizableError("grammar is deleting")
    if not flags.non_permuting:
        raise NotNormalizableError("grammar is permuting")
    return NormalGrammar(g, tuple(kinds), _build_occurrences(g))


def reverse_index(ng: NormalGrammar, nt: str) -> list[tuple[Rule, int]]:
    """All (rule, RHS position) pairs where nt occurs on the right-hand side."""
    return [
        (ng.grammar.rules[idx], pos)
        for idx, pos in ng.occurrences.get(nt, ())
    ]


# ---------------------------------------------------------------------------
# The transformation.  Steps run in sequence, each to fixpoint, processing
# rules in stable list order.  Fresh nonterminals are named
# <orig>__s<step>_<counter>; structurally identical fresh definitions are
# shared (hash-consing), which keeps product-generated rule families (the
# orthogonal-vectors gadgets) polynomial in practice.


class _Freshener:
    def __init__(self, taken: set[str]):
        self.taken = set(taken)
        self.counter = 0
        self.consed: dict[tuple, str] = {}

    def fresh(self, orig: str, step: int, key: tuple | None = None) -> str:
        if key is not None and key in self.consed:
            return self.consed[key]
        while True:
            self.counter += 1
            name = f"{orig}__s{step}_{self.counter}"
            if name not in self.taken:
                break
        self.taken.add(name)
        if key is not None:
            self.consed[key] = name
        return name


def _def_key(step: int, lhs_args, rhs) -> tuple:
    """Structural identity of a fresh definition, up to the fresh name."""
    return (step, lhs_args, rhs)


def _is_terminal_string(arg) -> bool:
    return all(isinstance(it, Term) for it in arg)


def _num_vars(arg) -> int:
    return sum(1 for it in arg if isinstance(it, Var))


def _self_rule_affixes(rule: Rule):
    """For a rank-1 rule A(..) <- A(..) of matching arity, the per-slot
    (prefix tokens, suffix tokens) when every argument is prefix+var+suffix
    with the variables in slot order; otherwise None."""
    if len(rule.rhs) != 1:
        return None
    nt, vs = rule.rhs[0]
    if nt != rule.lhs or len(rule.lhs_args) != len(vs):
        return None
    affixes = []
    for arg, v in zip(rule.lhs_args, vs):
        idxs = [i for i, it in enumerate(arg) if isinstance(it, Var)]
        if len(idxs) != 1 or arg[idxs[0]] != Var(v):
            return None
        i = idxs[0]
        prefix = tuple(it.token for it in arg[:i])
        suffix = tuple(it.token for it in arg[i + 1 :])
        affixes.append((prefix, suffix))
    return affixes


def _drop_redundant_self_rules(rules: list[Rule]) -> list[Rule]:
    """Drop self-rules that are compositions of single-affix self-rules
    already present (and identity self-rules, which derive nothing new).

    A rule A(p1 x1 q1, ..., pk xk qk) <- A(x1,...,xk) is implied by the
    single-token rules A(..,c xi,..) <- A and A(..,xi c,..) <- A, applied
    innermost-first; whenever all of those are present the composite adds
    no derivable tuple.
    """
    singles: set[tuple[str, int, int, str, str]] = set()
    for r in rules:
        aff = _self_rule_affixes(r)
        if aff is None:
            continue
        loaded = [
            (i, side, toks)
            for i, (p, q) in enumerate(aff)
            for side, toks in ((0, p), (1, q))
            if toks
        ]
        if len(loaded) == 1 and len(loaded[0][2]) == 1:
            i, side, toks = loaded[0]
            singles.add((r.lhs, len(aff), i, side, toks[0]))

    out = []
    for r in rules:
        aff = _self_rule_affixes(r)
        if aff is None:
            out.append(r)
            continue
        total = sum(len(p) + len(q) for p, q in aff)
        if total == 0:
            continue  # identity self-rule
        if total == 1:
            out.append(r)
            continue
        k = len(aff)
        covered = all(
            (r.lhs, k, i, side, tok) in singles
            for i, (p, q) in enumerate(aff)
            for side, toks in ((0, p), (1, q))
            for tok in toks
        )
        if not covered:
            out.append(r)
    return out


def _single_var_args(names) -> tuple:
    return tuple((Var(n),) for n in names)


def _xvars(k: int, base: str = "x") -> list[str]:
    return [f"{base}{i}" for i in range(1, k + 1)]


def normalize(g: Grammar) -> NormalGrammar:
    """Rewrite into normal form; language, dimension, and rank are preserved.

    Rejects deleting or permuting grammars: the transformation (and the
    engine built on it) presupposes their absence.
    """
    flags = classify_flags(g)
    if not flags.non_deleting:
        raise NotNormalizableError(
            "grammar is deleting; eliminate unused RHS variables first"
        )
    if not flags.non_permuting:
        raise NotNormalizableError(
            "grammar is permuting; reorder variables first"
        )

    rules = _drop_redundant_self_rules(list(g.rules))
    fresh = _Freshener(set(g.nonterminals))

    # Step 1: basic rules of arity > 1 lose their tail components.
    i = 0
    while i < len(rules):
        r = rules[i]
        if r.is_basic and len(r.lhs_args) > 1:
            key = _def_key(1, r.lhs_args[:1], ())
            a = fresh.fresh(r.lhs, 1, key)
            rules[i] = Rule(a, r.lhs_args[:1])
            x = Var("x")
            rules.insert(
                i + 1,
                Rule(r.lhs, ((x,),) + r.lhs_args[1:], ((a, ("x",)),)),
            )
        else:
            i += 1

    # Step 2: basic rules with more than one token peel their first token.
    i = 0
    while i < len(rules):
        r = rules[i]
        if r.is_basic and len(r.lhs_args) == 1 and len(r.lhs_args[0]) >= 2:
            w = r.lhs_args[0]
            key = _def_key(2, (w[:1],), ())
            a = fresh.fresh(r.lhs, 2, key)
            rules[i] = Rule(a, (w[:1],))
            rules.insert(
                i + 1,
                Rule(r.lhs, (((Var("x"),) + w[1:]),), ((a, ("x",)),)),
            )
        else:
            i += 1

    # Step 3: rules of rank >= 2 stop consuming terminals (and drop
    # terminal-only components, including empty ones, whose shape the
    # T5 join cannot express).
    i = 0
    while i < len(rules):
        r = rules[i]
        if len(r.rhs) < 2:
            i += 1
            continue
        target = None
        for ai, arg in enumerate(r.lhs_args):
            if any(isinstance(it, Term) for it in arg) or len(arg) == 0:
                target = ai
                break
        if target is None:
            i += 1
            continue
        ai = target
        arg = r.lhs_args[ai]
        if _is_terminal_string(arg):
            # case 1: extract the whole component
            rest = r.lhs_args[:ai] + r.lhs_args[ai + 1 :]
            key = _def_key(3, rest, r.rhs)
            a = fresh.fresh(r.lhs, 3, key)
            rules[i] = Rule(a, rest, r.rhs)
            k = len(r.lhs_args)
            xs = _xvars(k - 1)
            new_args = (
                _single_var_args(xs[:ai])
                + (arg,)
                + _single_var_args(xs[ai:])
            )
            rules.insert(i + 1, Rule(r.lhs, new_args, ((a, tuple(xs)),)))
            continue
        # find the first terminal run and the variable it attaches to
        first_term = next(
            t for t, it in enumerate(arg) if isinstance(it, Term)
        )
        end = first_term
        while end < len(arg) and isinstance(arg[end], Term):
            end += 1
        run = arg[first_term:end]
        coords = r.var_coords()
        if first_term == 0:
            # case 2: leading terminals migrate onto the following variable
            var = arg[end]
            j, m = coords[var.name]
            new_arg = arg[end:]
            attach_prefix = True
        else:
            # case 3: the run follows a variable; migrate onto it
            var = arg[first_term - 1]
            j, m = coords[var.name]
            new_arg = arg[:first_term] + arg[end:]
            attach_prefix = False
        pred_nt, pred_vs = r.rhs[j]
        xs = _xvars(len(pred_vs))
        helper_args = []
        for s, x in enumerate(xs):
            if s == m:
                helper_args.append(
                    run + (Var(x),) if attach_prefix else (Var(x),) + run
                )
            else:
                helper_args.append((Var(x),))
        key = _def_key(3, (pred_nt, m, attach_prefix, run), None)
        a = fresh.fresh(pred_nt, 3, key)
        helper = Rule(a, tuple(helper_args), ((pred_nt, tuple(xs)),))
        new_rhs = r.rhs[:j] + ((a, pred_vs),) + r.rhs[j + 1 :]
        new_lhs_args = r.lhs_args[:ai] + (new_arg,) + r.lhs_args[ai + 1 :]
        rules[i] = Rule(r.lhs, new_lhs_args, new_rhs)
        rules.insert(i, helper)
        # stay on the helper's successor: reprocess the rewritten rule
        i += 1

    # Step 4: rank-1 rules with a terminal-only component alongside a
    # non-single-variable component extract the terminal component.
    i = 0
    while i < len(rules):
        r = rules[i]
        if len(r.rhs) != 1:
            i += 1
            continue
        term_idx = None
        for ai, arg in enumerate(r.lhs_args):
            if _is_terminal_string(arg):
                others = [
                    a for t, a in enumerate(r.lhs_args) if t != ai
                ]
                if any(
                    not (len(a) == 1 and isinstance(a[0], Var))
                    for a in others
                ):
                    term_idx = ai
                    break
        if term_idx is None:
            i += 1
            continue
        ai = term_idx
        rest = r.lhs_args[:ai] + r.lhs_args[ai + 1 :]
        key = _def_key(4, rest, r.rhs)
        a = fresh.fresh(r.lhs, 4, key)
        rules[i] = Rule(a, rest, r.rhs)
        k = len(r.lhs_args)
        xs = _xvars(k - 1)
        new_args = (
            _single_var_args(xs[:ai])
            + (r.lhs_args[ai],)
            + _single_var_args(xs[ai:])
        )
        rules.insert(i + 1, Rule(r.lhs, new_args, ((a, tuple(xs)),)))

    # Step 5: rank-1 components with two or more variables and length > 2
    # split at the shortest prefix holding exactly one variable.
    i = 0
    while i < len(rules):
        r = rules[i]
        if len(r.rhs) != 1:
            i += 1
            continue
        target = None
        for ai, arg in enumerate(r.lhs_args):
            if _num_vars(arg) >= 2 and len(arg) > 2:
                target = ai
                break
        if target is None:
            i += 1
            continue
        ai = target
        arg = r.lhs_args[ai]
        split = next(
            t for t, it in enumerate(arg) if isinstance(it, Var)
        ) + 1
        s1, s2 = arg[:split], arg[split:]
        rest = r.lhs_args[:ai] + (s1, s2) + r.lhs_args[ai + 1 :]
        key = _def_key(5, rest, r.rhs)
        a = fresh.fresh(r.lhs, 5, key)
        rules[i] = Rule(a, rest, r.rhs)
        k = len(r.lhs_args)
        xs = _xvars(k + 1)
        merged = (Var(xs[ai]), Var(xs[ai + 1]))
        new_args = (
            _single_var_args(xs[:ai])
            + (merged,)
            + _single_var_args(xs[ai + 2 :])
        )
        rules.insert(i + 1, Rule(r.lhs, new_args, ((a, tuple(xs)),)))

    # Step 6: long or two-terminal components peel one outermost token.
    i = 0
    while i < len(rules):
        r = rules[i]
        if len(r.rhs) != 1:
            i += 1
            continue
        target = None
        for ai, arg in enumerate(r.lhs_args):
            if len(arg) > 2 or (
                len(arg) == 2 and _is_terminal_string(arg)
            ):
                target = ai
                break
        if target is None:
            i += 1
            continue
        ai = target
        arg = r.lhs_args[ai]
        k = len(r.lhs_args)
        xs = _xvars(k)
        if _num_vars(arg) > 0 and isinstance(arg[-1], Term):
            inner, outer, lead = arg[:-1], arg[-1], False
        elif _num_vars(arg) > 0:
            inner, outer, lead = arg[1:], arg[0], True
        else:
            inner, outer, lead = arg[1:], arg[0], True
        rest = r.lhs_args[:ai] + (inner,) + r.lhs_args[ai + 1 :]
        key = _def_key(6, rest, r.rhs)
        a = fresh.fresh(r.lhs, 6, key)
        rules[i] = Rule(a, rest, r.rhs)
        peeled = (
            (outer, Var(xs[ai])) if lead else (Var(xs[ai]), outer)
        )
        new_args = (
            _single_var_args(xs[:ai])
            + (peeled,)
            + _single_var_args(xs[ai + 1 :])
        )
        rules.insert(i + 1, Rule(r.lhs, new_args, ((a, tuple(xs)),)))

    # Step 7: at most one non-single-variable component per rank-1 rule.
    i = 0
    while i < len(rules):
        r = rules[i]
        if len(r.rhs) != 1:
            i += 1
            continue
        non_single = [
            ai
            for ai, arg in enumerate(r.lhs_args)
            if not (len(arg) == 1 and isinstance(arg[0], Var))
        ]
        if len(non_single) < 2:
            i += 1
            continue
        ai = non_single[0]
        arg = r.lhs_args[ai]
        vars_in = tuple(it for it in arg if isinstance(it, Var))
        rest = (
            r.lhs_args[:ai]
            + tuple((v,) for v in vars_in)
            + r.lhs_args[ai + 1 :]
        )
        key = _def_key(7, rest, r.rhs)
        a = fresh.fresh(r.lhs, 7, key)
        rules[i] = Rule(a, rest, r.rhs)
        k = len(r.lhs_args)
        p = len(vars_in)
        xs = _xvars(k + p - 1)
        # argument ai keeps its shape but over the helper's variables
        vt = iter(xs[ai : ai + p])
        rebuilt = tuple(
            Var(next(vt)) if isinstance(it, Var) else it for it in arg
        )
        new_args = (
            _single_var_args(xs[:ai])
            + (rebuilt,)
            + _single_var_args(xs[ai + p :])
        )
        rules.insert(i + 1, Rule(r.lhs, new_args, ((a, tuple(xs)),)))

    out = make_grammar(g.start, rules)
    ng = as_normal(out)
    return ng
