import random

import pytest

from mcflreach import (
    EPSILON,
    add_epsilon_selfloops,
    contract,
    format_graph,
    parse_graph,
    plain_reachability,
    string_to_path_graph,
)
from mcflreach.errors import ParseError
from mcflreach.graphs import ContractionMap, PathWitness, graph_from_edges

from conftest import fig1b_graph, fig1c_graph


def test_parse_fig1b():
    g = fig1b_graph()
    assert g.n == 11 and g.m == 10


def test_parse_fig1c():
    g = fig1c_graph()
    assert g.n == 7 and g.m == 7


def test_parse_empty():
    g = parse_graph("")
    assert g.n == 0 and g.m == 0


def test_parse_rejects_malformed_line():
    with pytest.raises(ParseError):
        parse_graph("a op1\n")


def test_parse_warns_on_duplicate_edge():
    with pytest.warns(UserWarning, match="duplicate"):
        g = parse_graph("a x b\na x b\n")
    assert g.m == 1


def test_graph_text_roundtrip():
    g = fig1b_graph()
    again = parse_graph(format_graph(g))
    assert again.named_edges() == g.named_edges()


def test_format_sorted():
    g = parse_graph("b y c\na x b\n")
    assert format_graph(g).splitlines() == ["a x b", "b y c"]


def test_epsilon_selfloops():
    g = graph_from_edges([], pre_nodes=["a", "b", "c"])
    aug = add_epsilon_selfloops(g)
    assert aug.m == 3
    assert all((v, EPSILON, v) in aug.edges for v in range(3))


def test_epsilon_selfloops_idempotent():
    g = fig1b_graph()
    once = add_epsilon_selfloops(g)
    twice = add_epsilon_selfloops(once)
    assert once.edges == twice.edges


def test_epsilon_selfloops_fig1b_count():
    g = fig1b_graph()
    assert add_epsilon_selfloops(g).m == g.m + 11


def test_plain_reachability_chain():
    g = parse_graph("a x b\nb y c\n")
    rows = plain_reachability(g)
    ids = g.node_ids
    reach = {
        (u, v)
        for u in g.node_names
        for v in g.node_names
        if (rows[ids[u]] >> ids[v]) & 1
    }
    assert reach == {
        ("a", "a"), ("a", "b"), ("a", "c"),
        ("b", "b"), ("b", "c"), ("c", "c"),
    }


def test_plain_reachability_two_cycle():
    g = parse_graph("a x b\nb y a\n")
    rows = plain_reachability(g)
    assert all(rows[u] == 0b11 for u in range(2))


def test_plain_reachability_fig1c():
    g = fig1c_graph()
    rows = plain_reachability(g)
    ids = g.node_ids
    assert (rows[ids["e"]] >> ids["k"]) & 1
    assert not (rows[ids["k"]] >> ids["e"]) & 1


def _floyd_warshall(g):
    n = g.n
    reach = [[u == v for v in range(n)] for u in range(n)]
    for u, _, v in g.edges:
        reach[u][v] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return reach


def test_plain_reachability_matches_floyd_warshall():
    rng = random.Random(42)
    for trial in range(8):
        n = 50
        edges = [
            (f"n{rng.randrange(n)}", "t", f"n{rng.randrange(n)}")
            for _ in range(120)
        ]
        g = graph_from_edges(edges, pre_nodes=[f"n{i}" for i in range(n)])
        rows = plain_reachability(g)
        fw = _floyd_warshall(g)
        for u in range(g.n):
            for v in range(g.n):
                assert bool((rows[u] >> v) & 1) == fw[u][v]


def test_string_to_path_graph():
    g, s, t = string_to_path_graph(["0", "1"])
    assert g.n == 3 and g.m == 2
    assert (s, t) == ("0", "2")


def test_string_to_path_graph_empty():
    g, s, t = string_to_path_graph([])
    assert g.n == 1 and g.m == 0 and s == t


def test_contract_identity():
    g = fig1b_graph()
    q = contract(g, ContractionMap({}))
    assert q.named_edges() == g.named_edges()


def test_contract_two_cycle():
    g = parse_graph("a x b\nb y a\n")
    q = contract(g, ContractionMap({"b": "a"}))
    assert q.n == 1
    assert q.named_edges() == [("a", "x", "a"), ("a", "y", "a")]


def test_contract_preserves_plain_reachability_of_reps():
    rng = random.Random(3)
    n = 12
    edges = [
        (f"n{rng.randrange(n)}", "t", f"n{rng.randrange(n)}")
        for _ in range(20)
    ]
    g = graph_from_edges(edges, pre_nodes=[f"n{i}" for i in range(n)])
    cmap = ContractionMap({"n5": "n1", "n7": "n1"})
    # only meaningful when the class members are mutually reachable; force it
    g = graph_from_edges(
        list(g.named_edges())
        + [("n5", "t", "n1"), ("n1", "t", "n5"), ("n7", "t", "n1"), ("n1", "t", "n7")],
    )
    q = contract(g, cmap)
    rows_g = plain_reachability(g)
    rows_q = plain_reachability(q)
    reps = [x for x in g.node_names if cmap.rep(x) == x]
    for a in reps:
        for b in reps:
            in_g = (rows_g[g.node_ids[a]] >> g.node_ids[b]) & 1
            in_q = (rows_q[q.node_ids[a]] >> q.node_ids[b]) & 1
            assert in_g == in_q


def test_contraction_map_rejects_mapped_representative():
    with pytest.raises(ValueError):
        ContractionMap({"a": "b", "b": "c"})


def test_path_witness_label_drops_epsilon():
    w = PathWitness(
        "a",
        "c",
        (("a", "x", "b"), ("b", EPSILON, "c")),
    )
    assert w.label == ("x",)


def test_path_witness_validates_continuity():
    with pytest.raises(ValueError):
        PathWitness("a", "c", (("a", "x", "b"), ("z", "y", "c")))
