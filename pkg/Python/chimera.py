import logging
from dataclasses import dataclass
from itertools import product
from typing import Iterator, NamedTuple

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)


class NodeCoord(NamedTuple):
    """Coordenada (x, y, z) de un qubit: fila, columna e índice bipartito."""
    x: int
    y: int
    z: int


@dataclass(frozen=True)
class ChimeraTopology:
    """
    Topología Chimera T(n, m, c): rejilla n x m de celdas K_{c,c}.

    Las aristas no se guardan; se calculan a partir de las coordenadas.
    Partito izquierdo (z <= c-1): acopladores entre celdas de la misma columna.
    Partito derecho (z >= c): acopladores entre celdas de la misma fila.

    Índice plano: ((x * m) + y) * 2c + z  (fila por fila, luego z).
    """
    rows: int
    cols: int
    shore: int

    def __post_init__(self):
        for name in ("rows", "cols", "shore"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} debe ser un entero positivo (recibido: {value!r}).")

    @property
    def shape(self):
        return (self.rows, self.cols, self.shore)

    @property
    def num_nodes(self):
        return 2 * self.shore * self.rows * self.cols

    @property
    def num_edges(self):
        n, m, c = self.shape
        return c * c * n * m + c * (n - 1) * m + c * n * (m - 1)

    def doubled(self):
        return ChimeraTopology(2 * self.rows, 2 * self.cols, self.shore)

    def contains(self, u):
        x, y, z = u
        return 0 <= x < self.rows and 0 <= y < self.cols and 0 <= z < 2 * self.shore

    def cell_of(self, i):
        u = coord_of(i, self)
        return (u.x, u.y)

    def fits_in(self, other):
        return self.shore == other.shore and self.rows <= other.rows and self.cols <= other.cols

    def __str__(self):
        return f"T({self.rows},{self.cols},{self.shore})"


def _check_coord(u, T):
    if len(u) != 3 or not T.contains(u):
        raise ValueError(f"Coordenada {tuple(u)} fuera de {T}.")


def node_index(u, T):
    _check_coord(u, T)
    x, y, z = u
    return ((x * T.cols) + y) * 2 * T.shore + z


def coord_of(i, T):
    if not 0 <= i < T.num_nodes:
        raise ValueError(f"Índice {i} fuera de [0, {T.num_nodes - 1}] en {T}.")
    cell, z = divmod(int(i), 2 * T.shore)
    x, y = divmod(cell, T.cols)
    return NodeCoord(x, y, z)


def neighbors(u, T):
    """
    Vecinos de u en T: los c nodos del partito opuesto de la misma celda,
    más los acopladores entre celdas (columna para el partito izquierdo,
    fila para el derecho) cuando la celda vecina existe.
    """
    _check_coord(u, T)
    x, y, z = u
    c = T.shore
    if z < c:
        result = [NodeCoord(x, y, c + j) for j in range(c)]
        if x > 0:
            result.append(NodeCoord(x - 1, y, z))
        if x < T.rows - 1:
            result.append(NodeCoord(x + 1, y, z))
    else:
        result = [NodeCoord(x, y, j) for j in range(c)]
        if y > 0:
            result.append(NodeCoord(x, y - 1, z))
        if y < T.cols - 1:
            result.append(NodeCoord(x, y + 1, z))
    return result


def adjacent(u, v, T):
    _check_coord(u, T)
    _check_coord(v, T)
    c = T.shore
    (xu, yu, zu), (xv, yv, zv) = u, v
    if (xu, yu) == (xv, yv):
        return (zu < c) != (zv < c)
    if zu != zv:
        return False
    if zu < c:
        return yu == yv and abs(xu - xv) == 1
    return xu == xv and abs(yu - yv) == 1


def index_neighbors(i, T):
    return sorted(node_index(v, T) for v in neighbors(coord_of(i, T), T))


def index_adjacent(i, j, T):
    return adjacent(coord_of(i, T), coord_of(j, T), T)


def neighbor_table(indices, T):
    """
    Vecinos de varios nodos a la vez.

    Devuelve un arreglo (len(indices), c + 2) de índices planos; las
    posiciones sin vecino (bordes de la rejilla) quedan en -1.
    """
    idx = np.asarray(indices, dtype=np.int64)
    c = T.shore
    cell_size = 2 * c
    cell, z = np.divmod(idx, cell_size)
    x, y = np.divmod(cell, T.cols)
    base = cell * cell_size
    left = z < c

    table = np.full((idx.size, c + 2), -1, dtype=np.int64)
    # Intra-celda: partito opuesto completo
    offsets = np.arange(c, dtype=np.int64)
    table[:, :c] = base[:, None] + np.where(left, c, 0)[:, None] + offsets[None, :]

    row_step = T.cols * cell_size
    up = np.where(left, x > 0, y > 0)
    down = np.where(left, x < T.rows - 1, y < T.cols - 1)
    step = np.where(left, row_step, cell_size)
    table[:, c] = np.where(up, idx - step, -1)
    table[:, c + 1] = np.where(down, idx + step, -1)
    return table


def iter_edges(T) -> Iterator[tuple]:
    """Enumera todas las aristas (i < j) a partir de las reglas de celda y acopladores."""
    n, m, c = T.shape
    for x, y in product(range(n), range(m)):
        for zl, zr in product(range(c), range(c, 2 * c)):
            yield (node_index((x, y, zl), T), node_index((x, y, zr), T))
        for z in range(c):
            if x < n - 1:
                yield (node_index((x, y, z), T), node_index((x + 1, y, z), T))
        for z in range(c, 2 * c):
            if y < m - 1:
                yield (node_index((x, y, z), T), node_index((x, y + 1, z), T))


def to_networkx(T):
    """Grafo materializado de T (solo para tamaños pequeños: oráculos y pruebas)."""
    G = nx.Graph()
    for i in range(T.num_nodes):
        G.add_node(i, coord=tuple(coord_of(i, T)))
    G.add_edges_from(iter_edges(T))
    return G
