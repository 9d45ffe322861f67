import json

import numpy as np
import pytest

from Python.chimera import ChimeraTopology, index_adjacent, node_index
from Python.embedding_core import (
    FREE,
    Embedding,
    EmbeddingFormatError,
    TopologyMismatchError,
    chain_length_stats,
    chain_lengths,
    grow_random_chains,
    is_connected_chain,
    load_embedding,
    min_enclosing_topology,
    minor_check_oracle,
    qubit_count,
    random_partial_map,
    save_embedding,
    verify,
)
from Python.logical_graph import LogicalGraph, random_connected_graph

T114 = ChimeraTopology(1, 1, 4)


def _idx(*coords, T=T114):
    return [node_index(u, T) for u in coords]


@pytest.fixture
def k3_embedding():
    return Embedding(T114, {
        0: _idx((0, 0, 0)),
        1: _idx((0, 0, 4)),
        2: _idx((0, 0, 1), (0, 0, 5)),
    })


def test_k3_example_is_feasible(triangle, k3_embedding):
    report = verify(triangle, k3_embedding)
    assert report.feasible
    assert report.violations == []
    assert minor_check_oracle(triangle, k3_embedding)
    assert qubit_count(k3_embedding) == 4


def test_empty_chain(triangle):
    emb = Embedding(T114, {0: _idx((0, 0, 0)), 1: _idx((0, 0, 4))})
    report = verify(triangle, emb)
    assert not report.feasible
    assert [v.nodes for v in report.by_kind("nonempty")] == [(2,)]
    assert not minor_check_oracle(triangle, emb)


def test_same_partite_chain_is_disconnected(single_edge):
    emb = Embedding(T114, {0: _idx((0, 0, 0), (0, 0, 1)), 1: _idx((0, 0, 4))})
    report = verify(single_edge, emb)
    bad = report.by_kind("chain-connectivity")
    assert len(bad) == 1
    assert bad[0].witness == [[0], [1]]


def test_chain_pieces_ordered_by_smallest_node(single_edge):
    T = ChimeraTopology(1, 2, 2)
    assert is_connected_chain([7, 3, 0, 5], T)
    assert not is_connected_chain([5, 1, 2], T)
    assert not is_connected_chain([], T)
    report = verify(single_edge, Embedding(T, {0: [6, 5, 1, 0], 1: [2]}))
    assert report.by_kind("chain-connectivity")[0].witness == [[0], [1], [5, 6]]


def test_missing_global_connection(single_edge):
    emb = Embedding(T114, {0: _idx((0, 0, 0)), 1: _idx((0, 0, 1))})
    report = verify(single_edge, emb)
    assert [v.nodes for v in report.violations] == [(0, 1)]
    assert report.violations[0].kind == "global-connection"
    assert "global-connection=1" in report.summary()


def test_overlap_detected_from_chains(single_edge):
    emb = Embedding(T114, {0: [0], 1: [0, 4]}, allow_overlap=True)
    assert emb.overlaps == [(0, 0, 1)]
    report = verify(single_edge, emb)
    assert report.by_kind("disjointness")[0].witness == 0
    assert not minor_check_oracle(single_edge, emb)


def test_strict_embedding_rejects_double_assignment():
    emb = Embedding(T114, {0: [0]})
    with pytest.raises(EmbeddingFormatError):
        emb.assign(1, 0)
    emb.assign(0, 0)
    assert emb.chain(0) == [0]


def test_out_of_range_index():
    emb = Embedding(T114)
    with pytest.raises(TopologyMismatchError):
        emb.assign(0, T114.num_nodes)


def test_verify_rejects_unknown_logical_nodes(single_edge):
    emb = Embedding(T114, {0: [0], 1: [4], 7: [5]})
    with pytest.raises(EmbeddingFormatError):
        verify(single_edge, emb)


def test_verify_topology_mismatch(single_edge, k3_embedding):
    with pytest.raises(TopologyMismatchError):
        verify(single_edge, k3_embedding, expected_topology=ChimeraTopology(2, 2, 4))


def test_subset_only_checks_induced_edges(triangle):
    emb = Embedding(T114, {0: [0], 1: [4]})
    assert verify(triangle, emb, subset=[0, 1]).feasible
    assert not verify(triangle, emb).feasible


def test_owner_map_and_audit(k3_embedding):
    assert k3_embedding.owner_of(5) == 2
    assert k3_embedding.is_free(7)
    assert int(k3_embedding.free_mask.sum()) == 4
    assert k3_embedding.audit() == []
    clone = k3_embedding.copy()
    clone.assign(0, 7)
    assert k3_embedding.owner_of(7) == FREE
    k3_embedding.owner[3] = 1
    assert k3_embedding.audit()


def test_metrics(k3_embedding):
    assert chain_lengths(k3_embedding) == {0: 1, 1: 1, 2: 2}
    assert chain_length_stats(k3_embedding) == {"max": 2, "mean": pytest.approx(4 / 3)}
    assert min_enclosing_topology(k3_embedding) == (1, 1, 4)
    assert qubit_count(Embedding(T114)) == 0
    assert min_enclosing_topology(Embedding(T114)) == (0, 0, 4)


def test_min_enclosing_topology_box():
    T = ChimeraTopology(4, 4, 2)
    emb = Embedding(T, {0: [node_index((1, 2, 0), T)], 1: [node_index((2, 3, 3), T)]})
    assert min_enclosing_topology(emb) == (2, 2, 2)


def test_json_round_trip(tmp_path, k3_embedding):
    path = tmp_path / "emb.json"
    save_embedding(k3_embedding, path)
    data = json.loads(path.read_text())
    assert data == {"topology": [1, 1, 4], "chains": {"0": [0], "1": [4], "2": [1, 5]}}
    loaded = load_embedding(path, expected_topology=T114)
    assert loaded.chains == {0: [0], 1: [4], 2: [1, 5]}
    with pytest.raises(TopologyMismatchError):
        load_embedding(path, expected_topology=ChimeraTopology(2, 2, 4))


@pytest.mark.parametrize("text", ["{", '{"chains": {}}', '{"topology": [1, 1], "chains": {}}',
                                  '{"topology": [1, 1, 4], "chains": {"a": [0]}}'])
def test_malformed_json(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(EmbeddingFormatError):
        load_embedding(path)


def test_oracle_scale_limit():
    P = LogicalGraph.from_edges([(i, i + 1) for i in range(12)])
    with pytest.raises(ValueError):
        minor_check_oracle(P, Embedding(ChimeraTopology(3, 3, 4)))
    with pytest.raises(ValueError):
        minor_check_oracle(LogicalGraph.from_edges([(0, 1)]), Embedding(ChimeraTopology(4, 1, 4)))


def _contact_edges(emb, T):
    edges = []
    keys = sorted(emb.chains)
    for a in keys:
        for b in keys:
            if a < b and any(index_adjacent(u, w, T) for u in emb.chain(a) for w in emb.chain(b)):
                edges.append((a, b))
    return edges


def _grown_instance(n, T, rng):
    """Cadenas conexas crecidas al azar y un grafo formado por (casi) solo aristas cubiertas."""
    empty = LogicalGraph.from_edges([], num_nodes=n, require_connected=False)
    emb, _ = grow_random_chains(empty, T, rng)
    edges = [e for e in _contact_edges(emb, T) if rng.random() < 0.7]
    if rng.random() < 0.3:
        u, v = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        if (u, v) not in edges:
            edges.append((u, v))
    return LogicalGraph.from_edges(edges, num_nodes=n, require_connected=False), emb


def test_verifier_agrees_with_oracle(rng):
    T = ChimeraTopology(2, 2, 2)
    outcomes = []
    for trial in range(1200):
        n = int(rng.integers(2, 7))
        if trial % 2:
            P, emb = _grown_instance(n, T, rng)
        else:
            P = random_connected_graph(n, 0.5, int(rng.integers(1 << 30)))
            emb = random_partial_map(P, T, rng)
        feasible = verify(P, emb).feasible
        assert feasible == minor_check_oracle(P, emb), (P.edges(), emb.chains)
        outcomes.append(feasible)
    assert any(outcomes) and not all(outcomes)


def test_verify_ignores_chain_order(rng):
    T = ChimeraTopology(2, 2, 2)
    for trial in range(300):
        n = int(rng.integers(2, 7))
        if trial % 2:
            P, emb = _grown_instance(n, T, rng)
        else:
            P = random_connected_graph(n, 0.5, int(rng.integers(1 << 30)))
            emb = random_partial_map(P, T, rng)
        shuffled = {v: [int(u) for u in rng.permutation(nodes)] for v, nodes in reversed(list(emb.chains.items()))}
        assert verify(P, Embedding(T, shuffled, allow_overlap=True)) == verify(P, emb)


def test_random_partial_map_is_deterministic():
    P = random_connected_graph(5, 0.6, 1)
    T = ChimeraTopology(2, 2, 2)
    a = random_partial_map(P, T, np.random.default_rng(3))
    b = random_partial_map(P, T, np.random.default_rng(3))
    assert a.chains == b.chains


def test_grow_random_chains_is_feasible_on_subset(rng):
    T = ChimeraTopology(3, 3, 2)
    for seed in range(20):
        P = random_connected_graph(8, 0.4, seed)
        emb, S = grow_random_chains(P, T, rng)
        assert sorted(emb.chains) == S
        assert verify(P, emb, subset=S).feasible
