import networkx as nx

from Python.chimera import ChimeraTopology, to_networkx

ORACLE_MAX_NODES = 12
ORACLE_MAX_TOPOLOGY = ChimeraTopology(3, 3, 4)


def minor_check_oracle(P, emb):
    """
    Oráculo independiente del verificador: contrae cada cadena a un solo
    vértice del grafo de hardware materializado y comprueba que P sea un
    subgrafo del grafo contraído.

    Solo para instancias pequeñas (|V_P| <= 12 y topología dentro de T(3,3,4)).
    """
    T = emb.topology
    limit = ORACLE_MAX_TOPOLOGY
    if P.num_nodes > ORACLE_MAX_NODES or any(a > b for a, b in zip(T.shape, limit.shape)):
        raise ValueError(
            f"Fuera de la escala del oráculo: |V_P|={P.num_nodes} (máx {ORACLE_MAX_NODES}), "
            f"{T} (máx {ORACLE_MAX_TOPOLOGY})."
        )

    H = to_networkx(T)
    chains = {v: set(emb.chain(v)) for v in P.nodes}

    claimed = set()
    for v, nodes in chains.items():
        if not nodes or claimed & nodes:
            return False
        # Contraer un conjunto solo es una operación de menor si es conexo
        if not nx.is_connected(H.subgraph(nodes)):
            return False
        claimed |= nodes

    H.remove_nodes_from([u for u in list(H.nodes) if u not in claimed])
    for v, nodes in chains.items():
        nodes = sorted(nodes)
        keep = nodes[0]
        for u in nodes[1:]:
            H = nx.contracted_nodes(H, keep, u, self_loops=False)
        H = nx.relabel_nodes(H, {keep: ("v", v)})

    return all(H.has_edge(("v", u), ("v", v)) for u, v in P.edges())
