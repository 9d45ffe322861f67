import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from Python.chimera import ChimeraTopology, index_neighbors, neighbor_table

logger = logging.getLogger(__name__)

FREE = -1

VIOLATION_KINDS = ("nonempty", "chain-connectivity", "disjointness", "global-connection")


class TopologyMismatchError(ValueError):
    pass


class EmbeddingFormatError(ValueError):
    pass


class Embedding:
    """
    Embebido φ: nodo lógico -> cadena (lista ordenada de índices planos)
    junto con el mapa inverso φ⁻¹ (arreglo `owner`, FREE = -1 para nodos libres).

    Con allow_overlap=True se aceptan cadenas que se solapan (embebidos
    externos); el mapa inverso guarda el primer dueño y `overlaps` los choques.
    """

    def __init__(self, topology, chains=None, allow_overlap=False):
        self.topology = topology
        self.chains = {}
        self.owner = np.full(topology.num_nodes, FREE, dtype=np.int64)
        self.overlaps = []
        self._allow_overlap = allow_overlap
        for v, nodes in (chains or {}).items():
            self.extend(v, nodes)

    def _check_index(self, u):
        if not 0 <= u < self.topology.num_nodes:
            raise TopologyMismatchError(f"Nodo de hardware {u} fuera de {self.topology}.")

    def assign(self, v, u):
        u = int(u)
        self._check_index(u)
        chain = self.chains.setdefault(v, [])
        current = self.owner[u]
        if current == v:
            return
        if current != FREE:
            if not self._allow_overlap:
                raise EmbeddingFormatError(f"El nodo {u} ya pertenece a la cadena de {int(current)}, no puede asignarse a {v}.")
            self.overlaps.append((u, int(current), v))
            chain.append(u)
            return
        self.owner[u] = v
        chain.append(u)

    def extend(self, v, nodes):
        self.chains.setdefault(v, [])
        for u in nodes:
            self.assign(v, u)

    def place(self, v, nodes):
        """Asigna de una vez una cadena completa de nodos libres a v."""
        idx = np.asarray(nodes, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.topology.num_nodes):
            raise TopologyMismatchError(f"La cadena de {v} tiene nodos fuera de {self.topology}.")
        if np.unique(idx).size != idx.size or (self.owner[idx] != FREE).any():
            raise EmbeddingFormatError(f"La cadena de {v} repite nodos o pisa otra cadena.")
        self.owner[idx] = v
        self.chains.setdefault(v, []).extend(idx.tolist())

    def merge(self, additional):
        """φ_i(v) := φ_{i-1}(v) ∪ φ'(v) para cada v."""
        for v, nodes in additional.items():
            self.extend(v, nodes)

    def chain(self, v):
        return self.chains.get(v, [])

    def owner_of(self, u):
        return int(self.owner[u])

    def is_free(self, u):
        return self.owner[u] == FREE

    @property
    def free_mask(self):
        return self.owner == FREE

    def copy(self):
        clone = Embedding.__new__(Embedding)
        clone.topology = self.topology
        clone.chains = {v: list(c) for v, c in self.chains.items()}
        clone.owner = self.owner.copy()
        clone.overlaps = list(self.overlaps)
        clone._allow_overlap = self._allow_overlap
        return clone

    def audit(self):
        """Comprueba la consistencia entre φ y φ⁻¹. Devuelve la lista de problemas."""
        problems = []
        expected = np.full(self.topology.num_nodes, FREE, dtype=np.int64)
        for v, nodes in self.chains.items():
            if len(set(nodes)) != len(nodes):
                problems.append(f"cadena {v} con nodos repetidos")
            for u in nodes:
                if expected[u] != FREE and expected[u] != v:
                    problems.append(f"nodo {u} en las cadenas {int(expected[u])} y {v}")
                else:
                    expected[u] = v
        if not self.overlaps:
            bad = np.flatnonzero(expected != self.owner)
            problems.extend(f"φ⁻¹({int(u)}) = {int(self.owner[u])}, se esperaba {int(expected[u])}" for u in bad[:10])
        return problems

    def to_dict(self):
        return {
            "topology": list(self.topology.shape),
            "chains": {str(v): sorted(self.chains[v]) for v in sorted(self.chains)},
        }

    @classmethod
    def from_dict(cls, data, allow_overlap=True):
        try:
            n, m, c = (int(t) for t in data["topology"])
            raw = data["chains"]
            chains = {int(v): [int(u) for u in nodes] for v, nodes in raw.items()}
        except (KeyError, TypeError, ValueError) as e:
            raise EmbeddingFormatError(f"Formato de embebido inválido: {e}") from None
        return cls(ChimeraTopology(n, m, c), chains, allow_overlap=allow_overlap)

    def __repr__(self):
        return f"Embedding({self.topology}, chains={len(self.chains)}, qubits={qubit_count(self)})"


def save_embedding(emb, path):
    Path(path).write_text(json.dumps(emb.to_dict()) + "\n")


def load_embedding(path, expected_topology=None):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise EmbeddingFormatError(f"JSON inválido en {path}: {e}") from None
    emb = Embedding.from_dict(data)
    if expected_topology is not None and emb.topology != expected_topology:
        raise TopologyMismatchError(f"El embebido usa {emb.topology} pero se esperaba {expected_topology}.")
    return emb


# --- Verificador ---------------------------------------------------------------

@dataclass
class Violation:
    kind: str
    nodes: tuple
    witness: object = None

    def __str__(self):
        return f"{self.kind} nodes={list(self.nodes)} witness={self.witness}"


@dataclass
class FeasibilityReport:
    violations: list = field(default_factory=list)

    @property
    def feasible(self):
        return not self.violations

    def by_kind(self, kind):
        return [v for v in self.violations if v.kind == kind]

    def summary(self):
        if self.feasible:
            return "Embebido factible: se cumplen las tres condiciones."
        counts = {k: len(self.by_kind(k)) for k in VIOLATION_KINDS if self.by_kind(k)}
        return "Embebido NO factible: " + ", ".join(f"{k}={n}" for k, n in counts.items())


def _connected_pieces(nodes, T):
    """Componentes del subgrafo inducido por `nodes` en T, ordenadas por su menor nodo."""
    arr = np.unique(np.asarray(list(nodes), dtype=np.int64))
    G = nx.Graph()
    G.add_nodes_from(arr.tolist())
    table = neighbor_table(arr, T)
    src = np.repeat(arr, table.shape[1])
    dst = table.ravel()
    keep = (src < dst) & np.isin(dst, arr)
    G.add_edges_from(zip(src[keep].tolist(), dst[keep].tolist()))
    return sorted(sorted(piece) for piece in nx.connected_components(G))


def is_connected_chain(nodes, T):
    """True si `nodes` es no vacío e induce un subgrafo conexo de T."""
    return len(_connected_pieces(nodes, T)) == 1


def _global_witness(chain_a, chain_b, T):
    a = np.array(sorted(chain_a), dtype=np.int64)
    table = neighbor_table(a, T)
    hits = np.isin(table, np.asarray(list(chain_b), dtype=np.int64))
    if not hits.any():
        return None
    row, col = np.argwhere(hits)[0]
    return (int(a[row]), int(table[row, col]))


def verify(P, emb, subset=None, expected_topology=None):
    """
    Verifica las tres condiciones del embebido menor sobre P[S]
    (S = todos los nodos si subset es None):

      1. toda cadena no vacía y las cadenas disjuntas,
      2. cada cadena induce un subgrafo conexo (conexión de cadena),
      3. cada arista (u, v) de P[S] tiene una arista de hardware entre
         φ(u) y φ(v) (conexión global).

    Solo lee las cadenas; no usa el mapa inverso del embebido.
    """
    T = emb.topology
    if expected_topology is not None and T != expected_topology:
        raise TopologyMismatchError(f"El embebido usa {T} pero se esperaba {expected_topology}.")
    unknown = [v for v in emb.chains if not (isinstance(v, (int, np.integer)) and 0 <= v < P.num_nodes)]
    if unknown:
        raise EmbeddingFormatError(f"Cadenas para nodos lógicos inexistentes: {unknown[:10]}")
    for v, nodes in emb.chains.items():
        for u in nodes:
            if not 0 <= u < T.num_nodes:
                raise TopologyMismatchError(f"La cadena de {v} usa el nodo {u}, fuera de {T}.")

    S = sorted(P.nodes) if subset is None else sorted(set(subset))
    report = FeasibilityReport()

    for v in S:
        if not emb.chain(v):
            report.violations.append(Violation("nonempty", (v,)))

    first_owner = {}
    for v in sorted(emb.chains):
        for u in sorted(set(emb.chains[v])):
            if u in first_owner and first_owner[u] != v:
                report.violations.append(Violation("disjointness", (first_owner[u], v), witness=u))
            else:
                first_owner[u] = v

    for v in S:
        nodes = set(emb.chain(v))
        if len(nodes) > 1:
            pieces = _connected_pieces(nodes, T)
            if len(pieces) > 1:
                report.violations.append(Violation("chain-connectivity", (v,), witness=pieces))

    for u, v in P.subgraph_edges(S):
        if emb.chain(u) and emb.chain(v) and _global_witness(emb.chain(u), emb.chain(v), T) is None:
            report.violations.append(Violation("global-connection", (u, v), witness=(u, v)))
    return report


def minor_check_oracle(P, emb):
    from Python.supVerif.subminor_oracle import minor_check_oracle as oracle
    return oracle(P, emb)


# --- Métricas ----------------------------------------------------------------

def qubit_count(emb):
    return sum(len(nodes) for nodes in emb.chains.values())


def chain_lengths(emb):
    return {v: len(emb.chains[v]) for v in sorted(emb.chains)}


def chain_length_stats(emb):
    lengths = [n for n in chain_lengths(emb).values() if n > 0]
    if not lengths:
        return {"max": 0, "mean": 0.0}
    return {"max": max(lengths), "mean": float(np.mean(lengths))}


def min_enclosing_topology(emb):
    """Caja mínima (n', m', c) de las celdas usadas por las cadenas."""
    T = emb.topology
    c = T.shore
    used = np.fromiter((u for nodes in emb.chains.values() for u in nodes), dtype=np.int64)
    if not used.size:
        return (0, 0, c)
    x, y = np.divmod(used // (2 * c), T.cols)
    return (int(x.max() - x.min() + 1), int(y.max() - y.min() + 1), c)


def random_partial_map(P, T, rng, max_chain=3, p_empty=0.1, p_overlap=0.1):
    """
    Cadenas aleatorias (posiblemente no factibles) para comparar el verificador
    con el oráculo: cadenas vacías, solapadas y desconectadas aparecen a propósito.
    """
    free = list(rng.permutation(T.num_nodes))
    used = []
    chains = {}
    for v in P.nodes:
        if rng.random() < p_empty:
            chains[v] = []
            continue
        size = int(rng.integers(1, max_chain + 1))
        nodes = []
        for _ in range(size):
            if used and rng.random() < p_overlap:
                nodes.append(int(used[int(rng.integers(len(used)))]))
            elif free:
                nodes.append(int(free.pop()))
        nodes = list(dict.fromkeys(nodes))
        used.extend(nodes)
        chains[v] = nodes
    return Embedding(T, chains, allow_overlap=True)


def grow_random_chains(P, T, rng, steps=None):
    """
    Embebido parcial factible aleatorio: se parte de un nodo por cadena y se
    crecen las cadenas hacia nodos libres vecinos. Se devuelve el embebido y
    el conjunto S de nodos cuya inclusión deja un embebido factible de P[S].
    """
    emb = Embedding(T)
    order = [int(v) for v in rng.permutation(P.num_nodes)]
    free = [int(u) for u in rng.permutation(T.num_nodes)]
    for v in order:
        if not free:
            break
        emb.assign(v, free.pop())
    steps = steps if steps is not None else T.num_nodes // 2
    for _ in range(steps):
        if not emb.chains:
            break
        v = list(emb.chains)[int(rng.integers(len(emb.chains)))]
        candidates = [w for u in emb.chain(v) for w in index_neighbors(u, T) if emb.is_free(w)]
        if candidates:
            emb.assign(v, candidates[int(rng.integers(len(candidates)))])
    # S: subconjunto voraz de nodos cuyas aristas quedan cubiertas
    S = []
    for v in sorted(emb.chains):
        if all(_global_witness(emb.chain(v), emb.chain(u), T) is not None for u in S if P.has_edge(u, v)):
            S.append(v)
    restricted = Embedding(T, {v: emb.chain(v) for v in S})
    return restricted, S
