import itertools

import pytest

from mcflreach import derive_oracle, make_grammar, oracle_member, oracle_strings
from mcflreach.errors import BudgetError
from mcflreach.grammar import Term, Var, rule_from_strings
from mcflreach.oracle import _substitute

from conftest import corpus


def brute_zk(tokens) -> bool:
    """Independent checker for {0^k 1^k : k >= 1}."""
    n = len(tokens)
    if n == 0 or n % 2:
        return False
    half = n // 2
    return all(t == "0" for t in tokens[:half]) and all(
        t == "1" for t in tokens[half:]
    )


def test_zk_oracle_matches_scanner(zk_grammar):
    for L in range(0, 11):
        for w in itertools.product("01", repeat=L):
            assert oracle_member(zk_grammar, w) == brute_zk(w), w


def test_zk_strings_at_6(zk_grammar):
    got = oracle_strings(zk_grammar, 6)
    assert got == {
        ("0", "1"),
        ("0", "0", "1", "1"),
        ("0", "0", "0", "1", "1", "1"),
    }


def test_copy_len0(copy_grammar):
    tuples = derive_oracle(copy_grammar, 0)
    assert ((), ()) in tuples["A"]
    assert tuples["S"] == set()


def test_copy_contains_paper_word(copy_grammar):
    assert oracle_member(copy_grammar, tuple("0100#0001"))


def test_copy_hash_alone(copy_grammar):
    assert oracle_member(copy_grammar, ("#",))


def test_copy_exhaustive_splits_vs_oracle(copy_grammar):
    # independent oracle: try every (w1, w2) split of both halves
    def brute(tokens):
        if tokens.count("#") != 1:
            return False
        cut = tokens.index("#")
        pre, post = tokens[:cut], tokens[cut + 1 :]
        for i in range(len(pre) + 1):
            w1, w2 = pre[:i], pre[i:]
            if w2 + w1 == post:
                return True
        return False

    for L in range(0, 6):
        for w in itertools.product("01#", repeat=L):
            assert oracle_member(copy_grammar, w) == brute(w), w


def test_tokens_outside_alphabet_are_nonmembers(zk_grammar):
    assert not oracle_member(zk_grammar, ("0", "z", "1"))


def test_monotone_and_fixpoint(copy_grammar, zk_grammar):
    for g in (copy_grammar, zk_grammar):
        prev: dict = {}
        for L in range(0, 9):
            cur = derive_oracle(g, L)
            for nt, vals in prev.items():
                assert vals <= cur[nt]
            prev = cur
        # one more rule application over the fixpoint adds nothing in-bound
        L = 8
        cur = derive_oracle(g, L)
        for rule in g.rules:
            if rule.is_basic:
                continue
            pools = [sorted(cur[nt]) for nt, _ in rule.rhs]
            for combo in itertools.product(*pools):
                env = {}
                for (nt, vs), val in zip(rule.rhs, combo):
                    env.update(zip(vs, val))
                value = _substitute(rule, env)
                if sum(len(s) for s in value) <= L:
                    assert value in cur[rule.lhs]


def test_budget_error(copy_grammar):
    with pytest.raises(BudgetError):
        derive_oracle(copy_grammar, 8, tuple_cap=3)


def test_deleting_grammar_supported():
    g = make_grammar(
        "S",
        [
            rule_from_strings("B", [["a"], ["b"]]),
            rule_from_strings("S", [["x"]], [("B", ["x", "y"])]),
        ],
    )
    assert oracle_strings(g, 2) == {("a",)}


def test_validate_clean_on_corpus_grammars():
    from mcflreach import validate

    for name, g in corpus():
        assert validate(g) == [], name
