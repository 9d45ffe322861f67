from itertools import combinations


def exact_densest_k_subgraph(P, k):
    """
    Subgrafo de k nodos con máximo número de aristas inducidas, por enumeración
    de todos los subconjuntos (solo para grafos pequeños).

    En empate gana el primer subconjunto en orden lexicográfico.
    """
    if not 1 <= k <= P.num_nodes:
        raise ValueError(f"k debe estar en [1, {P.num_nodes}] (k={k}).")
    # Máscara de bits de vecinos por nodo
    adj = [sum(1 << u for u in P.neighbors(v)) for v in P.nodes]
    best, best_count = None, -1
    for combo in combinations(P.nodes, k):
        mask = 0
        for v in combo:
            mask |= 1 << v
        count = sum((adj[v] & mask).bit_count() for v in combo) // 2
        if count > best_count:
            best, best_count = combo, count
    return list(best)
