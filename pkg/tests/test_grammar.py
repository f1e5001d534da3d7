import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcflreach import (
    classify_flags,
    format_grammar,
    make_grammar,
    parse_grammar,
    validate,
)
from mcflreach.errors import GrammarError, ParseError
from mcflreach.grammar import Rule, Term, Var, format_rule, rule_from_strings

from conftest import COPY_SRC, ZK_SRC


def test_parse_zk_grammar():
    g = parse_grammar(ZK_SRC)
    assert g.start == "S"
    assert g.dimension == 1
    assert g.rank == 1
    assert g.terminals == {"0", "1"}
    assert len(g.rules) == 2


def test_parse_eps_grammar():
    g = parse_grammar("start S\nS(eps)\n")
    assert g.rules[0].lhs_args == ((),)
    assert g.terminals == frozenset()


def test_parse_copy_grammar():
    g = parse_grammar(COPY_SRC)
    assert g.dimension == 2
    assert g.rank == 2
    assert g.nonterminals == {"S": 1, "A": 2}


def test_size_counts_variables_and_items():
    g = parse_grammar(COPY_SRC)
    # A(eps,eps)=0; two A->A rules: 4 LHS items + 2 RHS vars = 6 each;
    # S rule: 5 LHS items + 4 RHS vars = 9
    assert g.size == 0 + 6 + 6 + 9


def test_comments_and_blank_lines():
    g = parse_grammar("# heading\nstart S\n\nS('a')  # trailing\n")
    assert g.terminals == {"a"}


def test_hash_inside_terminal_is_not_a_comment():
    g = parse_grammar("start S\nS('#')\n")
    assert g.terminals == {"#"}


def test_syntax_error_has_location():
    with pytest.raises(ParseError) as ei:
        parse_grammar("start S\nS('a' <- S(x)\n")
    assert ei.value.line == 2


def test_missing_start():
    with pytest.raises(ParseError):
        parse_grammar("S('a')\n")


def test_arity_mismatch_rejected():
    with pytest.raises(GrammarError, match="arity"):
        parse_grammar("start S\nA('a')\nA('a','b')\nS(x) <- A(x)\n")


def test_variable_used_twice_rejected():
    with pytest.raises(GrammarError, match="twice"):
        parse_grammar("start S\nS(x x) <- A(x)\nA('a')\n")


def test_unknown_variable_rejected():
    with pytest.raises(GrammarError, match="unknown"):
        parse_grammar("start S\nS(x y) <- A(x)\nA('a')\n")


def test_duplicate_rhs_variable_rejected():
    with pytest.raises(GrammarError, match="duplicate"):
        parse_grammar("start S\nS(x y) <- A(x), A(y), B(x)\nA('a')\nB('b')\n")


def test_reserved_eps_token_rejected():
    with pytest.raises(ParseError):
        parse_grammar("start S\nS('@eps')\n")


def test_duplicate_rules_are_deduped():
    g = parse_grammar("start S\nS('a')\nS('a')\nS('b')\n")
    assert len(g.rules) == 2


def test_validate_clean_on_copy_grammar():
    assert validate(parse_grammar(COPY_SRC)) == []


def test_validate_flags_deleting_rule():
    g = make_grammar(
        "S",
        [
            rule_from_strings("S", [["x"]], [("A", ["x", "y"])]),
            rule_from_strings("A", [["a"], ["b"]]),
        ],
    )
    report = validate(g)
    assert any("deleting" in v for v in report)


def test_classify_flags_copy():
    flags = classify_flags(parse_grammar(COPY_SRC))
    assert flags.non_deleting and flags.non_permuting
    assert flags.dimension == 2 and flags.rank == 2


def test_classify_flags_permuting():
    g = make_grammar(
        "S",
        [
            rule_from_strings("A", [["y"], ["x"]], [("B", ["x", "y"])]),
            rule_from_strings("B", [["a"], ["b"]]),
            rule_from_strings("S", [["u", "v"]], [("A", ["u", "v"])]),
        ],
    )
    assert not classify_flags(g).non_permuting


def test_classify_flags_deleting():
    g = make_grammar(
        "S",
        [
            rule_from_strings("S", [["x"]], [("B", ["x", "y"])]),
            rule_from_strings("B", [["a"], ["b"]]),
        ],
    )
    assert not classify_flags(g).non_deleting


def test_roundtrip_copy():
    g = parse_grammar(COPY_SRC)
    assert parse_grammar(format_grammar(g)) == g


def test_roundtrip_preserves_eps_args():
    g = parse_grammar("start S\nA(eps, eps)\nS(x y) <- A(x, y)\n")
    text = format_grammar(g)
    assert "A(eps, eps)" in text
    assert parse_grammar(text) == g


def test_format_rule_readable():
    r = rule_from_strings("S", [["0", "x", "1"]], [("S", ["x"])])
    assert format_rule(r) == "S('0' x '1') <- S(x)"


# random structurally-valid grammars round-trip through the text format
_names = st.sampled_from(["S", "A", "B", "C"])
_tokens = st.sampled_from(["a", "b", "op1", "cp1", "#"])


@st.composite
def _grammars(draw):
    n_rules = draw(st.integers(1, 5))
    rules = []
    arities = {"S": 1}
    for _ in range(n_rules):
        lhs = draw(_names)
        rank = draw(st.integers(0, 2))
        rhs = []
        var_pool = []
        for i in range(rank):
            nt = draw(_names)
            k = arities.setdefault(nt, draw(st.integers(1, 2)))
            vs = [f"v{i}_{j}" for j in range(k)]
            var_pool.extend(vs)
            rhs.append((nt, vs))
        k_lhs = arities.setdefault(lhs, draw(st.integers(1, 2)))
        args = []
        pool = list(var_pool)
        for slot in range(k_lhs):
            items = []
            for _ in range(draw(st.integers(0, 3))):
                if pool and draw(st.booleans()):
                    items.append(pool.pop(0))
                else:
                    items.append(draw(_tokens))
            args.append(items)
        # non-deleting placement not required for round-tripping; any
        # leftover variables go to the last argument
        args[-1].extend(pool)
        rules.append(
            rule_from_strings(lhs, args, rhs, variables=var_pool)
        )
    if "S" not in {r.lhs for r in rules} or arities["S"] != 1:
        rules.append(rule_from_strings("S", [["a"]]))
    return make_grammar("S", rules)


@given(_grammars())
@settings(max_examples=60, deadline=None)
def test_roundtrip_random_grammars(g):
    assert parse_grammar(format_grammar(g)) == g
