import logging
import math
import random
from pathlib import Path

import networkx as nx

logger = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    pass


class DisconnectedGraphError(ValueError):
    def __init__(self, components):
        self.components = components
        super().__init__(
            f"El grafo lógico no es conexo ({components} componentes); "
            "ATOM asume un grafo conexo."
        )


class LogicalGraph:
    """
    Grafo lógico P = (V_P, E_P): simple, no dirigido, nodos 0..N-1.

    Por defecto se exige que sea conexo (el motor solo trabaja con grafos conexos).
    """

    def __init__(self, graph, require_connected=True):
        if graph.number_of_nodes() == 0:
            raise ValueError("El grafo lógico debe tener al menos un nodo.")
        if sorted(graph.nodes) != list(range(graph.number_of_nodes())):
            raise GraphFormatError("Los nodos deben ser los enteros 0..N-1.")
        if nx.number_of_selfloops(graph) > 0:
            u = next(iter(nx.nodes_with_selfloops(graph)))
            raise GraphFormatError(f"Lazo en el nodo {u}: el grafo debe ser simple.")
        self._graph = nx.Graph(graph)
        self._adj = [sorted(self._graph.neighbors(v)) for v in range(self._graph.number_of_nodes())]
        if require_connected:
            components = nx.number_connected_components(self._graph)
            if components != 1:
                raise DisconnectedGraphError(components)

    @classmethod
    def from_edges(cls, edges, num_nodes=None, require_connected=True):
        G = nx.Graph()
        edges = list(edges)
        if num_nodes is None:
            num_nodes = 1 + max((max(u, v) for u, v in edges), default=-1)
        G.add_nodes_from(range(num_nodes))
        seen = set()
        for u, v in edges:
            if u == v:
                raise GraphFormatError(f"Lazo en el nodo {u}: el grafo debe ser simple.")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(f"Arista repetida {key}.")
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise GraphFormatError(f"Arista {key} fuera del rango de nodos 0..{num_nodes - 1}.")
            seen.add(key)
            G.add_edge(u, v)
        return cls(G, require_connected=require_connected)

    @classmethod
    def from_networkx(cls, graph, require_connected=True):
        mapping = {v: i for i, v in enumerate(sorted(graph.nodes))}
        return cls(nx.relabel_nodes(graph, mapping), require_connected=require_connected)

    def to_networkx(self):
        return nx.Graph(self._graph)

    @property
    def num_nodes(self):
        return len(self._adj)

    @property
    def num_edges(self):
        return self._graph.number_of_edges()

    @property
    def nodes(self):
        return range(self.num_nodes)

    @property
    def degrees(self):
        return [len(a) for a in self._adj]

    def neighbors(self, v):
        return self._adj[v]

    def degree(self, v):
        return len(self._adj[v])

    def has_edge(self, u, v):
        return self._graph.has_edge(u, v)

    def edges(self):
        return sorted((min(u, v), max(u, v)) for u, v in self._graph.edges)

    def subgraph_edges(self, S):
        S = set(S)
        return [(u, v) for u, v in self.edges() if u in S and v in S]

    def induced_edge_count(self, S):
        return self._graph.subgraph(S).number_of_edges()

    def components(self):
        return nx.number_connected_components(self._graph)

    def __eq__(self, other):
        return isinstance(other, LogicalGraph) and self.num_nodes == other.num_nodes and self.edges() == other.edges()

    def __repr__(self):
        return f"LogicalGraph(nodes={self.num_nodes}, edges={self.num_edges})"


# --- Generadores -------------------------------------------------------------

def _check_ba(num_nodes, d):
    if not (1 <= d < num_nodes):
        raise ValueError(f"El grado d debe cumplir 1 <= d < num_nodes (d={d}, num_nodes={num_nodes}).")


def _attachment_edges(d):
    # d/2 aristas por nodo nuevo, redondeando hacia arriba
    return math.ceil(d / 2)


def gen_ba_star(num_nodes, d, seed):
    """Barabási-Albert con grafo semilla estrella de d+1 nodos."""
    _check_ba(num_nodes, d)
    seed_graph = nx.star_graph(d)
    G = nx.barabasi_albert_graph(num_nodes, _attachment_edges(d), seed=seed, initial_graph=seed_graph)
    return LogicalGraph(G)


def gen_ba_complete(num_nodes, d, seed):
    """Barabási-Albert con grafo semilla completo K_{d+1}."""
    _check_ba(num_nodes, d)
    seed_graph = nx.complete_graph(d + 1)
    G = nx.barabasi_albert_graph(num_nodes, _attachment_edges(d), seed=seed, initial_graph=seed_graph)
    return LogicalGraph(G)


def gen_regular(num_nodes, d, seed, max_tries=200):
    """
    Grafo d-regular aleatorio (modelo de emparejamientos con rechazo),
    se repite hasta obtener uno conexo.
    """
    if not (1 <= d < num_nodes):
        raise ValueError(f"El grado d debe cumplir 1 <= d < num_nodes (d={d}, num_nodes={num_nodes}).")
    if (d * num_nodes) % 2 != 0:
        raise ValueError(f"d * num_nodes debe ser par (d={d}, num_nodes={num_nodes}).")
    rng = random.Random(seed)
    for _ in range(max_tries):
        G = nx.random_regular_graph(d, num_nodes, seed=rng)
        if nx.is_connected(G):
            return LogicalGraph(G)
    raise ValueError(f"No se encontró un grafo {d}-regular conexo de {num_nodes} nodos en {max_tries} intentos.")


def random_connected_graph(num_nodes, p, seed, max_tries=1000):
    """G(n, p) muestreado hasta que sea conexo (grafos pequeños para pruebas)."""
    rng = random.Random(seed)
    for _ in range(max_tries):
        G = nx.gnp_random_graph(num_nodes, p, seed=rng)
        if nx.is_connected(G):
            return LogicalGraph(G)
    raise ValueError(f"No se obtuvo un G({num_nodes}, {p}) conexo en {max_tries} intentos.")


GENERATORS = {
    "ba_star": gen_ba_star,
    "ba_complete": gen_ba_complete,
    "regular": gen_regular,
}


def generate(model, num_nodes, d, seed):
    if model not in GENERATORS:
        raise ValueError(f"Modelo desconocido: {model}. Opciones: {', '.join(GENERATORS)}")
    return GENERATORS[model](num_nodes, d, seed)


# --- Subgrafo k más denso ----------------------------------------------------

EXACT_DENSEST_LIMIT = 20


def greedy_peeling(P, k):
    """
    Elimina repetidamente el nodo de menor grado (menor id en empate) hasta que queden k.

    Con tamaño fijo k el orden de pelado deja un único prefijo de k nodos, así
    que el mejor prefijo es el conjunto final y no hace falta recorrer los demás.
    """
    if not 1 <= k <= P.num_nodes:
        raise ValueError(f"k debe estar en [1, {P.num_nodes}] (k={k}).")
    alive = set(P.nodes)
    degree = {v: P.degree(v) for v in alive}
    while len(alive) > k:
        v = min(alive, key=lambda u: (degree[u], u))
        alive.remove(v)
        for u in P.neighbors(v):
            if u in alive:
                degree[u] -= 1
    return sorted(alive)


def densest_k_subgraph(P, k):
    """
    k nodos con (aproximadamente) el máximo número de aristas inducidas.

    Exacto por enumeración si |V_P| <= 20, pelado voraz en otro caso.
    """
    if not 1 <= k <= P.num_nodes:
        raise ValueError(f"k debe estar en [1, {P.num_nodes}] (k={k}).")
    if P.num_nodes <= EXACT_DENSEST_LIMIT:
        from Python.supVerif.subdensest import exact_densest_k_subgraph
        return exact_densest_k_subgraph(P, k)
    return greedy_peeling(P, k)


# --- Archivos de lista de aristas -------------------------------------------

def parse_edge_list(text):
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"Línea {lineno}: se esperaban dos enteros 'u v', se obtuvo {line!r}.")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"Línea {lineno}: valores no enteros en {line!r}.") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"Línea {lineno}: los ids deben ser no negativos.")
        edges.append((u, v))
    if not edges:
        raise GraphFormatError("El archivo no contiene aristas.")
    return LogicalGraph.from_edges(edges)


def load_edge_list(path):
    return parse_edge_list(Path(path).read_text())


def format_edge_list(P):
    lines = [f"# {P.num_nodes} {P.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in P.edges())
    return "\n".join(lines) + "\n"


def save_edge_list(P, path):
    Path(path).write_text(format_edge_list(P))
