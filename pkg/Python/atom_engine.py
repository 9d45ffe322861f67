import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from Python.chimera import ChimeraTopology, node_index, neighbor_table
from Python.embedding_core import (
    FREE,
    Embedding,
    chain_lengths,
    is_connected_chain,
    min_enclosing_topology,
    qubit_count,
    verify,
)
from Python.logical_graph import DisconnectedGraphError, densest_k_subgraph

logger = logging.getLogger(__name__)

SPLIT_DEGREES = ("total", "residual")


class TimeLimitExceeded(RuntimeError):
    def __init__(self, state, limit):
        self.state = state
        self.limit = limit
        super().__init__(f"Se superó el tiempo límite de {limit} s ({len(state.embedded)} nodos embebidos).")


class TopologyCapReached(RuntimeError):
    def __init__(self, state, cap):
        self.state = state
        self.cap = cap
        super().__init__(f"No hay embebido factible con la topología limitada a {cap[0]}x{cap[1]}.")


class EngineInvariantError(AssertionError):
    pass


@dataclass
class EngineConfig:
    """
    Parámetros del motor.

    k=None usa min(2 * shore, |V_P|). initial_topology / max_topology son
    pares (n, m); max_topology modela un QPU de tamaño fijo.
    """
    shore: int = 4
    k: Optional[int] = None
    initial_topology: Optional[Tuple[int, int]] = None
    max_topology: Optional[Tuple[int, int]] = None
    seed: int = 0
    time_limit: Optional[float] = None
    split_degree: str = "total"
    debug: bool = False

    def __post_init__(self):
        if self.shore < 1:
            raise ValueError(f"shore debe ser >= 1 (recibido: {self.shore}).")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k debe ser >= 1 (recibido: {self.k}).")
        if self.split_degree not in SPLIT_DEGREES:
            raise ValueError(f"split_degree debe ser uno de {SPLIT_DEGREES} (recibido: {self.split_degree!r}).")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("El tiempo límite no puede ser negativo.")
        for name in ("initial_topology", "max_topology"):
            size = getattr(self, name)
            if size is not None:
                if len(size) != 2 or min(size) < 1:
                    raise ValueError(f"{name} debe ser un par (n, m) de enteros positivos.")
                setattr(self, name, (int(size[0]), int(size[1])))

    def resolve_k(self, P):
        k = min(2 * self.shore, P.num_nodes) if self.k is None else self.k
        if k > P.num_nodes:
            raise ValueError(f"k={k} supera el número de nodos del grafo ({P.num_nodes}).")
        return k


@dataclass
class EngineState:
    graph: object
    embedding: Embedding
    k: int
    embedded: set = field(default_factory=set)
    weights: dict = field(default_factory=dict)
    scores: dict = field(default_factory=dict)
    turn: int = 1
    iterations: int = 0
    expansions: int = 0
    isolated: bool = False
    current: Optional[int] = None
    trace: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def topology(self):
        return self.embedding.topology


@dataclass
class EmbedReport:
    topology: tuple
    min_enclosing_topology: tuple
    qubits_used: int
    iterations: int
    turns: int
    expansions: int
    wall_time: float
    chain_lengths: dict
    k: int
    num_nodes: int
    num_edges: int
    seed: int = 0

    @property
    def max_chain_length(self):
        return max(self.chain_lengths.values(), default=0)

    def to_dict(self):
        return {
            "topology": list(self.topology),
            "min_enclosing_topology": list(self.min_enclosing_topology),
            "qubits_used": self.qubits_used,
            "iterations": self.iterations,
            "turns": self.turns,
            "expansions": self.expansions,
            "wall_time": self.wall_time,
            "k": self.k,
            "num_nodes": self.num_nodes,
            "num_edges": self.num_edges,
            "seed": self.seed,
            "max_chain_length": self.max_chain_length,
            "chain_lengths": {str(v): n for v, n in self.chain_lengths.items()},
        }


# --- Inicialización ------------------------------------------------------------

def complete_embedding(nodes, T):
    """
    Embebido del grafo completo K_k (construcción diagonal / triangular).

    El nodo en la posición i tiene bloque b = i // c y desplazamiento r = i % c;
    su cadena es la banda de fila (b, y, c + r), y = 0..b, más la banda de
    columna (x, b, r), x = b..t-1, con t = ceil(k / c). Dos cadenas se tocan en
    la celda (max(b_i, b_j), min(b_i, b_j)).
    """
    c = T.shore
    t = math.ceil(len(nodes) / c)
    if t > T.rows or t > T.cols:
        raise ValueError(f"{T} es demasiado pequeña para K_{len(nodes)} (se necesita {t}x{t}).")
    chains = {}
    for pos, v in enumerate(nodes):
        b, r = divmod(pos, c)
        row_band = [node_index((b, y, c + r), T) for y in range(b + 1)]
        col_band = [node_index((x, b, r), T) for x in range(b, t)]
        chains[v] = row_band + col_band
    return chains


def _touches(chain_a, chain_b, T):
    table = neighbor_table(np.asarray(chain_a, dtype=np.int64), T)
    return bool(np.isin(table, np.asarray(chain_b, dtype=np.int64)).any())


def restrict_complete_embedding(P, chains, T):
    """
    Quita hojas de las cadenas de ψ (mayor índice primero) mientras cada cadena
    siga no vacía y conexa y cada arista de P' conserve su conexión global.
    """
    S = set(chains)
    chains = {v: list(nodes) for v, nodes in chains.items()}
    changed = True
    while changed:
        changed = False
        for v in sorted(chains):
            for u in sorted(chains[v], reverse=True):
                if len(chains[v]) == 1:
                    break
                trial = [w for w in chains[v] if w != u]
                if not is_connected_chain(trial, T):
                    continue
                if all(_touches(trial, chains[x], T) for x in P.neighbors(v) if x in S):
                    chains[v] = trial
                    changed = True
    return chains


def initialize(P, k, T0, max_topology=None):
    """
    Estado inicial: P' = subgrafo k más denso, φ_0 = ψ (embebido completo de
    P' recortado a sus aristas), S_0 = V(P'), w[v] = 0, i = 1.

    Si T0 es pequeña para ψ se agranda; si el límite max_topology no alcanza
    se lanza TopologyCapReached.
    """
    if not 1 <= k <= P.num_nodes:
        raise ValueError(f"k debe estar en [1, {P.num_nodes}] (k={k}).")
    c = T0.shore
    nodes = densest_k_subgraph(P, k)
    t = math.ceil(k / c)
    rows, cols = max(T0.rows, t), max(T0.cols, t)
    T = ChimeraTopology(rows, cols, c)

    state = EngineState(graph=P, embedding=Embedding(T), k=k)
    state.weights = {v: 0 for v in P.nodes}
    if max_topology is not None and (rows > max_topology[0] or cols > max_topology[1]):
        raise TopologyCapReached(state, max_topology)

    psi = restrict_complete_embedding(P, complete_embedding(nodes, T), T)
    state.embedding = Embedding(T, psi)
    for v in nodes:
        _mark_embedded(state, v, 0)
    logger.debug("Inicialización: k=%d, %s, %d qubits", k, T, qubit_count(state.embedding))
    return state


def _mark_embedded(state, v, weight):
    state.embedded.add(v)
    state.weights[v] = weight
    state.scores.pop(v, None)
    for x in state.graph.neighbors(v):
        if x not in state.embedded:
            state.scores[x] = state.scores.get(x, 0) + weight


# --- Selección de nodo ---------------------------------------------------------

def select_next_node(state):
    """
    argmin sobre v ∉ S con algún vecino en S de la suma de w de sus vecinos
    embebidos; en empate gana el menor id.
    """
    if not state.scores:
        raise ValueError("No hay nodos candidatos adyacentes a S (¿grafo no conexo?).")
    return min(state.scores, key=lambda v: (state.scores[v], v))


# --- Embebido de nodo ----------------------------------------------------------

def _in_sorted(sorted_values, items):
    if not sorted_values.size:
        return np.zeros(items.size, dtype=bool)
    pos = np.minimum(np.searchsorted(sorted_values, items), sorted_values.size - 1)
    return sorted_values[pos] == items


def _find_sorted(sorted_values, u):
    pos = int(np.searchsorted(sorted_values, u))
    return pos if pos < sorted_values.size and sorted_values[pos] == u else -1


class ChainSearch:
    """
    BFS desde la cadena φ(v) por nodos libres, un nivel por llamada a `advance`.

    Solo se guardan los niveles visitados (ordenados) y el padre de cada nodo
    de esos niveles; el costo depende de la región explorada y no del tamaño
    de la topología. En empate el padre es el de menor índice.
    """

    def __init__(self, emb, v):
        self.emb = emb
        source = np.unique(np.asarray(emb.chain(v), dtype=np.int64))
        self.levels = [source]
        self.parents = [np.full(source.size, -1, dtype=np.int64)]

    @property
    def depth(self):
        return len(self.levels) - 1

    @property
    def active(self):
        return self.levels[-1].size > 0

    def advance(self):
        """Explora el siguiente nivel y devuelve sus nodos (ordenados)."""
        frontier = self.levels[-1]
        if not frontier.size:
            return frontier
        table = neighbor_table(frontier, self.emb.topology)
        parent = np.repeat(frontier, table.shape[1])
        nb = table.ravel()
        ok = nb >= 0
        nb, parent = nb[ok], parent[ok]
        # Los vecinos del nivel l solo pueden estar en l - 1, l o l + 1
        ok = (self.emb.owner[nb] == FREE) & ~_in_sorted(frontier, nb)
        if len(self.levels) > 1:
            ok &= ~_in_sorted(self.levels[-2], nb)
        nb, parent = nb[ok], parent[ok]
        # frontier está ordenado: la primera aparición de cada nodo trae el menor padre
        nb, first = np.unique(nb, return_index=True)
        self.levels.append(nb)
        self.parents.append(parent[first])
        return nb

    def distance(self, u):
        for depth, level in enumerate(self.levels):
            if _find_sorted(level, u) >= 0:
                return depth
        return -1

    def path_from(self, u):
        """Camino limpio (u, ..., nodo de la cadena) siguiendo los padres."""
        depth = self.distance(u)
        if depth < 0:
            raise ValueError(f"El nodo {u} no fue alcanzado por la búsqueda.")
        path = [int(u)]
        while depth > 0:
            pos = _find_sorted(self.levels[depth], path[-1])
            path.append(int(self.parents[depth][pos]))
            depth -= 1
        return path


def clean_path_field(emb, v, max_depth=None):
    """
    BFS multifuente desde la cadena φ(v) avanzando solo por nodos libres.

    Devuelve (dist, parent) del tamaño de la topología: dist[u] = d_v(u)
    (-1 si no hay camino limpio, 0 en la cadena) y parent[u] = siguiente
    nodo hacia la cadena.
    """
    T = emb.topology
    dist = np.full(T.num_nodes, -1, dtype=np.int64)
    parent = np.full(T.num_nodes, -1, dtype=np.int64)
    search = ChainSearch(emb, v)
    dist[search.levels[0]] = 0
    while search.active and (max_depth is None or search.depth < max_depth):
        nb = search.advance()
        dist[nb] = search.depth
        parent[nb] = search.parents[-1]
    return dist, parent


def _search_center(emb, A):
    """
    Avanza las BFS de todas las cadenas de A al mismo paso.

    En el nivel l, un nodo alcanzado por r de las |A| cadenas con suma parcial
    t tiene suma final >= t + (|A| - r)(l + 1), y uno no alcanzado >= |A|(l + 1).
    La búsqueda para cuando ninguna de esas cotas llega a la mejor suma s*.

    Devuelve (ū, búsquedas) o None si ningún nodo libre alcanza todas las
    cadenas (problema aislado).
    """
    count = len(A)
    searches = [ChainSearch(emb, v) for v in A]
    num_nodes = emb.topology.num_nodes
    reached = np.zeros(num_nodes, dtype=np.int32)
    total = np.zeros(num_nodes, dtype=np.int64)
    best = None
    pending = []
    level = 0
    while any(s.active for s in searches):
        level += 1
        for search in searches:
            nb = search.advance()
            if not nb.size:
                continue
            reached[nb] += 1
            total[nb] += level
            done = nb[reached[nb] == count]
            if done.size:
                sums = total[done]
                i = np.lexsort((done, sums))[0]
                candidate = (int(sums[i]), int(done[i]))
                if best is None or candidate < best:
                    best = candidate
            pending.append(nb)
        if best is None:
            continue
        # Cotas solo crecen y s* solo baja: lo descartado no vuelve
        partial = np.unique(np.concatenate(pending))
        partial = partial[reached[partial] < count]
        lower = total[partial] + (count - reached[partial]) * (level + 1)
        partial = partial[lower <= best[0]]
        pending = [partial]
        if not partial.size and count * (level + 1) > best[0]:
            break
    if best is None:
        return None
    return best[1], searches


def _split_degrees(P, S, v_new, v, mode):
    if mode == "total":
        return P.degree(v_new), P.degree(v)
    # Vecinos aún sin embeber, +1 para no dividir entre cero
    g_new = sum(1 for x in P.neighbors(v_new) if x not in S) + 1
    g_old = sum(1 for x in P.neighbors(v) if x not in S and x != v_new) + 1
    return g_new, g_old


def node_embedding(P, emb, S, v_new, split_degree="total"):
    """
    Embebido adicional φ' para el nodo nuevo v̄.

    Paso 1: centro ū = nodo libre con mínima suma de distancias limpias a las
    cadenas de A = {v ∈ S : (v̄, v) ∈ E_P}. Paso 2: cada camino limpio
    Z_ūv = (z_0 = ū, ..., z_L) se reparte entre v̄ y v según los grados.

    Devuelve {} (embebido vacío) si hay problema aislado.
    """
    A = [v for v in P.neighbors(v_new) if v in S]
    if not A:
        raise ValueError(f"El nodo {v_new} no tiene vecinos embebidos.")
    found = _search_center(emb, A)
    if found is None:
        return {}
    center, searches = found
    paths = {v: search.path_from(center) for v, search in zip(A, searches)}
    interiors = {v: set(path[1:-1]) for v, path in paths.items()}

    additional = {v_new: [center]}
    seen = {center}
    for v in A:
        path = paths[v]
        L = len(path) - 1
        others = set()
        for w in A:
            if w != v:
                others |= interiors[w]
        # Mayor índice compartido con el camino de otra cadena (0 si ninguno)
        i_v = max((i for i in range(1, L) if path[i] in others), default=0)
        g_new, g_old = _split_degrees(P, S, v_new, v, split_degree)
        delta = (g_new * (L - 1 - i_v)) // (g_new + g_old)
        for z in path[1:i_v + delta + 1]:
            if z not in seen:
                additional[v_new].append(z)
                seen.add(z)
        tail = path[i_v + delta + 1:L]
        if tail:
            additional.setdefault(v, []).extend(tail)
            seen.update(tail)
    return additional


# --- Adaptación de topología ---------------------------------------------------

def topology_adapting(emb):
    """
    Duplica la topología: cada nodo (x, y, z) de una cadena pasa a (2x, 2y, z)
    y gana un compañero (2x+1, 2y, z) si z <= c-1, o (2x, 2y+1, z) si no.

    Devuelve (φ†, T(2n, 2m, c)).
    """
    T = emb.topology
    T2 = T.doubled()
    c = T.shore
    doubled = Embedding(T2)
    for v, nodes in emb.chains.items():
        idx = np.asarray(nodes, dtype=np.int64)
        cell, z = np.divmod(idx, 2 * c)
        x, y = np.divmod(cell, T.cols)
        left = z < c
        base = ((2 * x) * T2.cols + 2 * y) * 2 * c + z
        companion = np.where(left, base + T2.cols * 2 * c, base + 2 * c)
        doubled.place(v, np.column_stack([base, companion]).ravel())
    return doubled, T2


# --- Bucle principal -----------------------------------------------------------

def _check_deadline(state, deadline, limit, start):
    if deadline is not None and time.perf_counter() >= deadline:
        state.wall_time = time.perf_counter() - start
        raise TimeLimitExceeded(state, limit)


def _debug_audit(P, state):
    problems = state.embedding.audit()
    if problems:
        raise EngineInvariantError(f"φ y φ⁻¹ inconsistentes: {problems[:3]}")
    report = verify(P, state.embedding, subset=state.embedded)
    if not report.feasible:
        raise EngineInvariantError(f"Turno {state.turn}: φ no es factible para P[S]: {report.summary()}")


def run_engine(P, config=None):
    """Ejecuta ATOM y devuelve el estado final completo (incluye la traza de eventos)."""
    config = config or EngineConfig()
    start = time.perf_counter()
    deadline = None if config.time_limit is None else start + config.time_limit

    components = P.components()
    if components != 1:
        raise DisconnectedGraphError(components)

    k = config.resolve_k(P)
    rows, cols = config.initial_topology or (1, 1)
    state = initialize(P, k, ChimeraTopology(rows, cols, config.shore), config.max_topology)
    if config.debug:
        _debug_audit(P, state)
    _check_deadline(state, deadline, config.time_limit, start)

    cap = config.max_topology
    while len(state.embedded) < P.num_nodes:
        _check_deadline(state, deadline, config.time_limit, start)
        if not state.isolated:
            state.current = select_next_node(state)
        v_new = state.current

        additional = node_embedding(P, state.embedding, state.embedded, v_new, config.split_degree)
        state.iterations += 1
        if additional:
            state.embedding.merge(additional)
            state.isolated = False
            _mark_embedded(state, v_new, state.turn)
            state.trace.append(("embed", v_new, state.turn))
            logger.debug("Turno %d: nodo %d, %d qubits nuevos", state.turn, v_new,
                         sum(len(n) for n in additional.values()))
            state.turn += 1
            if config.debug:
                _debug_audit(P, state)
        else:
            if state.isolated:
                raise EngineInvariantError(f"El nodo {v_new} sigue aislado tras expandir la topología.")
            state.trace.append(("empty", v_new, state.turn))
            n, m, _ = state.topology.shape
            if cap is not None and (2 * n > cap[0] or 2 * m > cap[1]):
                state.wall_time = time.perf_counter() - start
                raise TopologyCapReached(state, cap)
            state.isolated = True
            state.embedding, T = topology_adapting(state.embedding)
            state.expansions += 1
            state.iterations += 1
            state.trace.append(("adapt", T.shape, state.turn))
            logger.info("Problema aislado en el nodo %d: topología expandida a %s", v_new, T)

        if state.iterations > 3 * P.num_nodes:
            raise EngineInvariantError(f"{state.iterations} iteraciones superan 3|V_P| = {3 * P.num_nodes}.")

    state.wall_time = time.perf_counter() - start
    logger.info("ATOM: %d nodos, k=%d, %s, %d qubits, %d expansiones, %.3f s",
                P.num_nodes, k, state.topology, qubit_count(state.embedding),
                state.expansions, state.wall_time)
    return state


def build_report(state, config):
    P = state.graph
    return EmbedReport(
        topology=state.topology.shape,
        min_enclosing_topology=min_enclosing_topology(state.embedding),
        qubits_used=qubit_count(state.embedding),
        iterations=state.iterations,
        turns=state.turn - 1,
        expansions=state.expansions,
        wall_time=state.wall_time,
        chain_lengths=chain_lengths(state.embedding),
        k=state.k,
        num_nodes=P.num_nodes,
        num_edges=P.num_edges,
        seed=config.seed,
    )


def embed(P, config=None):
    """Algoritmo ATOM completo: devuelve (Embedding, EmbedReport)."""
    config = config or EngineConfig()
    state = run_engine(P, config)
    return state.embedding, build_report(state, config)
