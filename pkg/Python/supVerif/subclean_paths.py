import networkx as nx

from Python.chimera import to_networkx
from Python.embedding_core import FREE


def reference_clean_distances(emb, v):
    """
    Distancias limpias de referencia a la cadena φ(v), calculadas sobre el
    grafo materializado: se quitan los nodos de las demás cadenas y se corre
    Dijkstra multifuente desde φ(v) con networkx.

    Devuelve {u: d_v(u)} para los nodos libres alcanzables (y 0 en la cadena).
    """
    T = emb.topology
    chain = set(emb.chain(v))
    allowed = [u for u in range(T.num_nodes) if emb.owner_of(u) == FREE or u in chain]
    H = to_networkx(T).subgraph(allowed)
    if not chain:
        return {}
    return dict(nx.multi_source_dijkstra_path_length(H, chain))
