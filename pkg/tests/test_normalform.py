import pytest

from mcflreach import (
    classify_rule,
    is_normal_form,
    normalize,
    oracle_strings,
    parse_grammar,
    reverse_index,
)
from mcflreach.errors import NotNormalizableError
from mcflreach.grammar import make_grammar, rule_from_strings
from mcflreach.normalform import T1, T2, T3, T4, T5

from conftest import COPY_SRC, corpus

# the normal-form counterpart of the copy grammar, as a behavioral target
COPY_NORMAL_SRC = """\
start S
A1(eps)
A(x, eps) <- A1(x)
A2(x1, x2 '0') <- A(x1, x2)
A(x1 '0', x2) <- A2(x1, x2)
A3(x1, x2 '1') <- A(x1, x2)
A(x1 '1', x2) <- A3(x1, x2)
A4(x1 '#', x2) <- A(x1, x2)
S(x1 y1 y2 x2) <- A(x1, x2), A4(y1, y2)
"""


def test_classify_t1_eps():
    r = rule_from_strings("A", [[]])
    assert classify_rule(r) == T1(None)


def test_classify_t1_token():
    r = rule_from_strings("A", [["a"]])
    assert classify_rule(r) == T1("a")


def test_classify_t2():
    r = rule_from_strings("A", [["0", "x1"], ["x2"]], [("B", ["x1", "x2"])])
    assert classify_rule(r) == T2(0, "0")


def test_classify_t3():
    r = rule_from_strings("A", [["x1"], ["x2", "0"]], [("B", ["x1", "x2"])])
    assert classify_rule(r) == T3(1, "0")


def test_classify_t4_eps():
    r = rule_from_strings("A", [["x"], []], [("B", ["x"])])
    assert classify_rule(r) == T4(1, None)


def test_classify_t4_token():
    r = rule_from_strings("A", [["x1"], ["a"], ["x2"]], [("B", ["x1", "x2"])])
    assert classify_rule(r) == T4(1, "a")


def test_classify_t5_merge():
    r = rule_from_strings(
        "S",
        [["x1", "y1", "y2", "x2"]],
        [("A", ["x1", "x2"]), ("A4", ["y1", "y2"])],
    )
    kind = classify_rule(r)
    assert kind == T5((((0, 0), (1, 0), (1, 1), (0, 1)),))


def test_classify_rejects_two_terminal_rule():
    r = rule_from_strings(
        "A", [["x1", "0"], ["x2", "0"]], [("A", ["x1", "x2"])]
    )
    assert classify_rule(r) is None


def test_classify_rejects_basic_multitoken():
    assert classify_rule(rule_from_strings("A", [["a", "b"]])) is None


def test_is_normal_form_table_right():
    assert is_normal_form(parse_grammar(COPY_NORMAL_SRC))


def test_is_normal_form_table_left():
    assert not is_normal_form(parse_grammar(COPY_SRC))


def test_is_normal_form_eps_grammar(eps_grammar):
    assert is_normal_form(eps_grammar)


def test_normalize_copy_matches_language(copy_grammar):
    ng = normalize(copy_grammar)
    assert is_normal_form(ng.grammar)
    assert oracle_strings(ng.grammar, 9) == oracle_strings(copy_grammar, 9)


@pytest.mark.parametrize("name,g", corpus())
def test_normalize_preserves_language_to_8(name, g):
    ng = normalize(g)
    assert is_normal_form(ng.grammar), name
    assert oracle_strings(ng.grammar, 8) == oracle_strings(g, 8), name


@pytest.mark.parametrize("name,g", corpus())
def test_normalize_preserves_dimension_and_rank(name, g):
    ng = normalize(g)
    assert ng.grammar.dimension == g.dimension, name
    # rank may only shrink (redundant product rules can disappear)
    assert ng.grammar.rank <= max(g.rank, 1), name


@pytest.mark.parametrize("name,g", corpus())
def test_normalize_output_classifies(name, g):
    ng = normalize(g)
    assert all(k is not None for k in ng.kinds), name


@pytest.mark.parametrize("name,g", corpus())
def test_normalize_size_polynomial(name, g):
    out = normalize(g).grammar
    # loose cubic witness; the observed constant stays tiny on the corpus
    assert out.size <= 10 * max(g.size, 1) ** 3, (name, g.size, out.size)


def test_normalize_idempotent_on_normal_input():
    g = parse_grammar(COPY_NORMAL_SRC)
    ng = normalize(g)
    assert ng.grammar.rules == g.rules


def test_normalize_rejects_deleting():
    g = make_grammar(
        "S",
        [
            rule_from_strings("B", [["a"], ["b"]]),
            rule_from_strings("S", [["x"]], [("B", ["x", "y"])]),
        ],
    )
    with pytest.raises(NotNormalizableError, match="deleting"):
        normalize(g)


def test_normalize_rejects_permuting():
    g = make_grammar(
        "S",
        [
            rule_from_strings("B", [["a"], ["b"]]),
            rule_from_strings("A", [["y"], ["x"]], [("B", ["x", "y"])]),
            rule_from_strings("S", [["u", "v"]], [("A", ["u", "v"])]),
        ],
    )
    with pytest.raises(NotNormalizableError, match="permuting"):
        normalize(g)


def test_reverse_index_copy_t5():
    ng = normalize(parse_grammar(COPY_SRC))
    occs = reverse_index(ng, "A")
    t5_entries = [
        (r, pos) for r, pos in occs if classify_rule(r) and len(r.rhs) == 2
    ]
    assert any(pos == 0 for _, pos in t5_entries)


def test_reverse_index_unknown_nt():
    ng = normalize(parse_grammar(COPY_SRC))
    assert reverse_index(ng, "NOPE") == []


def test_reverse_index_repeated_nt():
    g = parse_grammar(
        "start S\nA('a')\nS(x1 y1) <- A(x1), A(y1)\n"
    )
    ng = normalize(g)
    occs = reverse_index(ng, "A")
    assert len(occs) == 2
    assert {pos for _, pos in occs} == {0, 1}


def test_normalize_dyck_cfg_language():
    from mcflreach.dyck import gen_dyck_cfg

    g = gen_dyck_cfg(1)
    ng = normalize(g)
    assert oracle_strings(ng.grammar, 8) == oracle_strings(g, 8)


def test_redundant_product_self_rules_collapse():
    # a two-affix self-rule implied by its single-affix companions is dropped
    src = """\
start S
A('m')
A('a' x) <- A(x)
A(x 'b') <- A(x)
A('a' x 'b') <- A(x)
S(x) <- A(x)
"""
    g = parse_grammar(src)
    ng = normalize(g)
    assert oracle_strings(ng.grammar, 5) == oracle_strings(g, 5)
    # the composite rule left no two-token chain behind
    assert len(ng.grammar.rules) == 4


def test_non_redundant_lockstep_rule_kept():
    # no single-affix companions: the two-token rule must survive (as a chain)
    src = """\
start S
A('m')
A('a' x 'b') <- A(x)
S(x) <- A(x)
"""
    g = parse_grammar(src)
    ng = normalize(g)
    assert oracle_strings(ng.grammar, 7) == oracle_strings(g, 7)
    assert ("a", "m", "b") in oracle_strings(ng.grammar, 3)
