import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import networkx as nx
import numpy as np
import pytest

from Python.logical_graph import LogicalGraph


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def triangle():
    return LogicalGraph.from_edges([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def single_edge():
    return LogicalGraph.from_edges([(0, 1)])


@pytest.fixture
def k5_pendant():
    """K_5 en los nodos 0..4 y un nodo colgante 5 unido a 4."""
    edges = [(u, v) for u in range(5) for v in range(u + 1, 5)] + [(4, 5)]
    return LogicalGraph.from_edges(edges)


@pytest.fixture
def complete_graph():
    def build(n):
        return LogicalGraph(nx.complete_graph(n))
    return build
