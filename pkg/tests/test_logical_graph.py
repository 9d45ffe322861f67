from itertools import combinations

import networkx as nx
import pytest

from Python.logical_graph import (
    DisconnectedGraphError,
    GraphFormatError,
    LogicalGraph,
    densest_k_subgraph,
    format_edge_list,
    gen_ba_complete,
    gen_ba_star,
    gen_regular,
    generate,
    greedy_peeling,
    load_edge_list,
    parse_edge_list,
    random_connected_graph,
    save_edge_list,
)
from Python.supVerif.subdensest import exact_densest_k_subgraph


def _average_degree(P):
    return 2 * P.num_edges / P.num_nodes


def test_ba_star_size_and_degree():
    P = gen_ba_star(100, 10, 0)
    assert P.num_nodes == 100
    assert nx.is_connected(P.to_networkx())
    assert 8 <= _average_degree(P) <= 12


def test_ba_star_without_attachment_is_the_star():
    P = gen_ba_star(11, 10, 3)
    assert nx.is_isomorphic(P.to_networkx(), nx.star_graph(10))


def test_ba_star_is_deterministic():
    assert gen_ba_star(200, 10, 7).edges() == gen_ba_star(200, 10, 7).edges()


def test_ba_complete_seed_graph():
    P = gen_ba_complete(11, 10, 0)
    assert P.num_edges == 55
    P = gen_ba_complete(400, 10, 1)
    assert P.num_nodes == 400
    assert P.components() == 1
    assert sum(P.degrees) == 2 * P.num_edges


def test_regular_degrees():
    P = gen_regular(100, 10, 1)
    assert set(P.degrees) == {10}
    assert P.num_edges == 500


def test_regular_small_is_k4():
    P = gen_regular(4, 3, 0)
    assert P.num_edges == 6


def test_regular_parity_error():
    with pytest.raises(ValueError):
        gen_regular(5, 3, 0)


@pytest.mark.parametrize("args", [(10, 0, 0), (10, 10, 0), (3, 5, 0)])
def test_ba_domain_errors(args):
    with pytest.raises(ValueError):
        gen_ba_star(*args)
    with pytest.raises(ValueError):
        gen_ba_complete(*args)


def test_generate_dispatch():
    assert generate("regular", 10, 3, 2).edges() == gen_regular(10, 3, 2).edges()
    with pytest.raises(ValueError):
        generate("erdos", 10, 3, 2)


def test_densest_finds_clique(k5_pendant):
    assert sorted(densest_k_subgraph(k5_pendant, 5)) == [0, 1, 2, 3, 4]
    assert greedy_peeling(k5_pendant, 5) == [0, 1, 2, 3, 4]


def test_densest_single_node(k5_pendant):
    S = densest_k_subgraph(k5_pendant, 1)
    assert len(S) == 1
    assert k5_pendant.induced_edge_count(S) == 0


@pytest.mark.parametrize("seed", range(5))
def test_densest_matches_brute_force(seed):
    P = random_connected_graph(8, 0.5, seed)
    best = max(P.induced_edge_count(c) for c in combinations(P.nodes, 4))
    S = densest_k_subgraph(P, 4)
    assert len(S) == 4
    assert P.induced_edge_count(S) == best


def test_greedy_peeling_close_to_exact(rng):
    trials, matches = 300, 0
    for trial in range(trials):
        n = int(rng.integers(6, 13))
        P = random_connected_graph(n, 0.5, trial)
        k = int(rng.integers(2, n))
        best = P.induced_edge_count(exact_densest_k_subgraph(P, k))
        greedy = P.induced_edge_count(greedy_peeling(P, k))
        assert greedy <= best
        # densest_k_subgraph nunca queda por debajo del pelado voraz
        assert P.induced_edge_count(densest_k_subgraph(P, k)) == best
        matches += greedy == best
    assert matches >= 0.9 * trials


def test_greedy_peeling_on_large_graph():
    P = gen_ba_complete(60, 10, 0)
    S = densest_k_subgraph(P, 11)
    assert S == greedy_peeling(P, 11)
    assert len(S) == 11
    assert S == sorted(S)


def test_densest_k_out_of_range(triangle):
    with pytest.raises(ValueError):
        densest_k_subgraph(triangle, 0)
    with pytest.raises(ValueError):
        densest_k_subgraph(triangle, 4)


def test_parse_path_graph():
    P = parse_edge_list("0 1\n1 2")
    assert P.num_nodes == 3
    assert P.edges() == [(0, 1), (1, 2)]


def test_parse_ignores_comments_and_blank_lines():
    P = parse_edge_list("# 3 2\n\n0 1\n  \n2 1\n")
    assert P.edges() == [(0, 1), (1, 2)]


@pytest.mark.parametrize("text", ["3 3", "0 1\n1 0", "0 a", "0 1 2", "", "-1 0"])
def test_parse_errors(text):
    with pytest.raises(GraphFormatError):
        parse_edge_list(text)


def test_disconnected_input_reports_components():
    with pytest.raises(DisconnectedGraphError) as info:
        parse_edge_list("0 1\n2 3\n4 5")
    assert info.value.components == 3


def test_save_load_round_trip(tmp_path, complete_graph):
    P = complete_graph(7)
    path = tmp_path / "k7.txt"
    save_edge_list(P, path)
    assert path.read_text().startswith("# 7 21\n")
    assert load_edge_list(path) == P


def test_format_edge_list_sorted():
    P = LogicalGraph.from_edges([(2, 1), (0, 2)])
    assert format_edge_list(P) == "# 3 2\n0 2\n1 2\n"


def test_accessors(triangle):
    assert triangle.num_nodes == 3
    assert triangle.num_edges == 3
    assert triangle.neighbors(1) == [0, 2]
    assert triangle.degree(0) == 2
    assert triangle.has_edge(2, 0)
    assert triangle.subgraph_edges({0, 2}) == [(0, 2)]


def test_nodes_must_be_contiguous():
    G = nx.Graph([(0, 2)])
    with pytest.raises(GraphFormatError):
        LogicalGraph(G)
    assert LogicalGraph.from_networkx(G).edges() == [(0, 1)]
