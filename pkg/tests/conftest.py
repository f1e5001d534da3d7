import functools

import pytest

from mcflreach import parse_grammar
from mcflreach.dyck import DyckSpec, Variant, gen_dyck_cfg, gen_family
from mcflreach.engine import available_kernels
from mcflreach.graphs import graph_from_edges
from mcflreach.normalform import normalize
from mcflreach.oracle import derive_oracle

COPY_SRC = """\
start S
A(eps, eps)
A(x1 '0', x2 '0') <- A(x1, x2)
A(x1 '1', x2 '1') <- A(x1, x2)
S(x1 y1 '#' y2 x2) <- A(x1, x2), A(y1, y2)
"""

ZK_SRC = """\
start S
S('0' '1')
S('0' x '1') <- S(x)
"""

EPS_SRC = """\
start S
S(eps)
"""


@pytest.fixture(scope="session")
def copy_grammar():
    return parse_grammar(COPY_SRC)


@pytest.fixture(scope="session")
def zk_grammar():
    return parse_grammar(ZK_SRC)


@pytest.fixture(scope="session")
def eps_grammar():
    return parse_grammar(EPS_SRC)


@pytest.fixture(scope="session")
def spec1():
    return DyckSpec.of(1)


@functools.lru_cache(maxsize=None)
def family(d: int, variant: str, k: int = 1):
    return gen_family(d, DyckSpec.of(k), Variant(variant))


@functools.lru_cache(maxsize=None)
def family_normal(d: int, variant: str, k: int = 1):
    return normalize(family(d, variant, k))


@functools.lru_cache(maxsize=None)
def normalized(src: str):
    return normalize(parse_grammar(src))


@functools.lru_cache(maxsize=None)
def oracle_cached(src_or_key, max_len: int):
    """Memoized derive_oracle keyed by grammar source text."""
    return derive_oracle(parse_grammar(src_or_key), max_len)


def corpus():
    """The grammar corpus the oracle-equivalence criteria quantify over."""
    return [
        ("copy", parse_grammar(COPY_SRC)),
        ("zk", parse_grammar(ZK_SRC)),
        ("dyck-cfg", gen_dyck_cfg(1)),
        ("G1circ", family(1, "circ")),
        ("G2circ", family(2, "circ")),
        ("G1plus", family(1, "plus")),
        ("G2plus", family(2, "plus")),
    ]


def fig1b_graph():
    return graph_from_edges(
        [
            ("a", "op10", "x"),
            ("d", "op16", "x"),
            ("b", "op10", "y"),
            ("x", "ob1", "p"),
            ("y", "ob2", "p"),
            ("p", "@eps", "tie_ret"),
            ("tie_ret", "cp10", "q"),
            ("tie_ret", "cp16", "r"),
            ("q", "cb1", "c"),
            ("r", "cb2", "e"),
        ]
    )


def fig1c_graph():
    return graph_from_edges(
        [
            ("e", "ob1", "g"),
            ("g", "op100", "h"),
            ("h", "cb1", "f"),
            ("f", "ob1", "e"),
            ("g", "cb1", "i"),
            ("i", "cp100", "j"),
            ("j", "cb1", "k"),
        ]
    )


FIG1B_SPEC = DyckSpec(pairs=(10, 16), brackets=(1, 2))
FIG1C_SPEC = DyckSpec(pairs=(100,), brackets=(1,))


@functools.lru_cache(maxsize=None)
def family_normal_spec(d: int, variant: str, which: str):
    spec = FIG1B_SPEC if which == "fig1b" else FIG1C_SPEC
    return normalize(gen_family(d, spec, Variant(variant)))


def pytest_generate_tests(metafunc):
    if "kernel" in metafunc.fixturenames:
        metafunc.parametrize("kernel", available_kernels())
