"""Bottom-up derivation oracle.

Computes, by fixpoint iteration, every tuple a nonterminal derives whose
summed component length stays within a bound.  Substitution never shortens a
component, so the truncated space is closed: any derivation of a bounded
tuple only passes through bounded tuples.  This is the ground truth the
normalizer and the reachability engine are tested against.
"""

from __future__ import annotations

from itertools import product

from .errors import BudgetError
from .grammar import Grammar, Rule, Term, Var

# A derived string is a tuple of terminal tokens; a derived value is a tuple
# of such strings, one per nonterminal slot.
Str = tuple
TupleSet = dict  # nonterminal -> set of derived values

DEFAULT_TUPLE_CAP = 10**7


def _basic_value(rule: Rule) -> tuple[Str, ...]:
    return tuple(tuple(item.token for item in arg) for arg in rule.lhs_args)


def _substitute(rule: Rule, env: dict[str, Str]) -> tuple[Str, ...]:
    out = []
    for arg in rule.lhs_args:
        parts: list[str] = []
        for item in arg:
            if isinstance(item, Term):
                parts.append(item.token)
            else:
                parts.extend(env[item.name])
        out.append(tuple(parts))
    return tuple(out)


def derive_oracle(
    g: Grammar, max_total_len: int, tuple_cap: int = DEFAULT_TUPLE_CAP
) -> TupleSet:
    """All derivable tuples with summed length <= max_total_len.

    Semi-naive evaluation: each round only instantiates rules with at least
    one freshly derived tuple on the right-hand side.  Tuples are bucketed
    by total length so combinations that must exceed the bound are never
    enumerated.  Raises BudgetError when the tuple count exceeds tuple_cap.
    """
    if max_total_len < 0:
        raise ValueError("max_total_len must be >= 0")
    # nt -> total length -> set of values
    old: dict = {nt: {} for nt in g.nonterminals}
    fresh: dict = {nt: {} for nt in g.nonterminals}
    total = 0

    def add(nt: str, value: tuple[Str, ...], length: int) -> None:
        nonlocal total
        if value in old[nt].get(length, ()) or value in fresh[nt].get(
            length, ()
        ):
            return
        fresh[nt].setdefault(length, set()).add(value)
        total += 1
        if total > tuple_cap:
            raise BudgetError(
                f"oracle exceeded {tuple_cap} tuples at bound {max_total_len}"
            )

    for rule in g.rules:
        if rule.is_basic:
            value = _basic_value(rule)
            length = sum(len(s) for s in value)
            if length <= max_total_len:
                add(rule.lhs, value, length)

    productions = []
    for rule in g.rules:
        if rule.is_basic:
            continue
        n_terms = sum(
            1
            for arg in rule.lhs_args
            for item in arg
            if isinstance(item, Term)
        )
        # deleting rules may shrink their inputs, so only non-deleting ones
        # get the tight combination budget
        rhs_vars = {v for _, vs in rule.rhs for v in vs}
        deleting = rhs_vars - set(rule.lhs_variables())
        productions.append((rule, n_terms if not deleting else 0))

    def combos(rule, n_terms, pools):
        """Length-feasible tuples, one value per RHS predicate."""
        budget = max_total_len - n_terms

        def rec(i, remaining, acc):
            if i == len(pools):
                yield acc
                return
            for length, values in pools[i].items():
                if length > remaining:
                    continue
                for val in values:
                    yield from rec(i + 1, remaining - length, acc + (val,))

        yield from rec(0, budget, ())

    while any(fresh[nt] for nt in fresh):
        last = fresh
        for nt in old:
            for length, values in last[nt].items():
                old[nt].setdefault(length, set()).update(values)
        fresh = {nt: {} for nt in g.nonterminals}
        for rule, n_terms in productions:
            rhs_nts = [nt for nt, _ in rule.rhs]
            # at least one predicate draws from the last round's tuples
            for fresh_mask in range(1, 1 << len(rhs_nts)):
                pools = []
                ok = True
                for i, nt in enumerate(rhs_nts):
                    if fresh_mask & (1 << i):
                        pool = last[nt]
                    else:
                        pool = {
                            length: old[nt][length] - last[nt].get(length, set())
                            for length in old[nt]
                        }
                        pool = {
                            length: vs for length, vs in pool.items() if vs
                        }
                    if not pool:
                        ok = False
                        break
                    pools.append(pool)
                if not ok:
                    continue
                for combo in combos(rule, n_terms, pools):
                    env: dict[str, Str] = {}
                    for (nt, vs), val in zip(rule.rhs, combo):
                        for v, s in zip(vs, val):
                            env[v] = s
                    value = _substitute(rule, env)
                    length = sum(len(s) for s in value)
                    if length <= max_total_len:
                        add(rule.lhs, value, length)
    return {
        nt: {v for vs in buckets.values() for v in vs}
        for nt, buckets in old.items()
    }


def oracle_strings(g: Grammar, max_len: int) -> set:
    """Derived start-symbol strings up to the given length."""
    tuples = derive_oracle(g, max_len)
    return {val[0] for val in tuples.get(g.start, set())}


def oracle_member(g: Grammar, w) -> bool:
    """Membership by direct appeal to the derivation semantics.

    Tokens outside the alphabet make the answer False, not an error.
    """
    w = tuple(w)
    if any(tok not in g.terminals for tok in w):
        return False
    return w in oracle_strings(g, len(w))
