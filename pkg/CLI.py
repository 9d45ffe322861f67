import importlib
import sys

from tabulate import tabulate

from Python.cli import EXIT_CODES, main as cli_main

# Diccionario de modelos de grafo lógico con información completa
MODELS = {
    "ba_star": {
        "module": ("logical_graph", "gen_ba_star"),
        # Descripción corta, general
        "description": (
            "Grafo Barabási-Albert inicializado con una estrella de d+1 nodos. Cada nodo nuevo se une "
            "a ceil(d/2) nodos existentes con probabilidad proporcional a su grado."
        ),
        # Para qué sirve
        "purpose": (
            "Modela grafos lógicos con pocos nodos muy conectados (hubs) y muchos de grado bajo, "
            "como los que aparecen en problemas QUBO derivados de redes reales."
        ),
        # Datos requeridos
        "required_inputs": [
            "Número de nodos (--nodes), mayor que d",
            "Grado promedio d (--degree), por ejemplo 10 o 20",
            "Semilla (--seed)"
        ],
        # Ejemplo
        "example": "python CLI.py gen --model ba_star --nodes 100 --degree 10 --seed 0 --out ba_star.txt"
    },

    "ba_complete": {
        "module": ("logical_graph", "gen_ba_complete"),
        "description": (
            "Grafo Barabási-Albert inicializado con un grafo completo K_{d+1}."
        ),
        "purpose": (
            "Igual que ba_star pero con un núcleo denso desde el inicio; es el caso más exigente "
            "para el embebido porque el subgrafo más denso ya es un clique."
        ),
        "required_inputs": [
            "Número de nodos (--nodes), mayor que d",
            "Grado promedio d (--degree)",
            "Semilla (--seed)"
        ],
        "example": "python CLI.py gen --model ba_complete --nodes 400 --degree 10 --seed 1 --out ba_complete.txt"
    },

    "regular": {
        "module": ("logical_graph", "gen_regular"),
        "description": (
            "Grafo d-regular aleatorio: todos los nodos tienen grado exactamente d. Se vuelve a "
            "muestrear hasta obtener un grafo conexo."
        ),
        "purpose": (
            "Sirve de contraste con los modelos BA: sin hubs, la carga se reparte por igual entre las cadenas."
        ),
        "required_inputs": [
            "Número de nodos (--nodes), con d * nodes par",
            "Grado d (--degree), menor que el número de nodos",
            "Semilla (--seed)"
        ],
        "example": "python CLI.py gen --model regular --nodes 100 --degree 10 --seed 1 --out regular.txt"
    }
}

MODULE_PATH = "Python"


def resolve_generator(name):
    """Devuelve la función generadora registrada para el modelo `name`."""
    if name not in MODELS:
        raise ValueError(f"Modelo desconocido: {name}. Opciones: {', '.join(MODELS)}")
    module_name, func_name = MODELS[name]["module"]
    module = importlib.import_module(f"{MODULE_PATH}.{module_name}")
    return getattr(module, func_name)


def show_models(name=None, stream=None):
    """Tabla de los modelos registrados (o la ficha completa de uno) en stderr."""
    stream = stream or sys.stderr
    if name is None:
        rows = [[key, info["description"]] for key, info in MODELS.items()]
        stream.write(tabulate(rows, headers=["Modelo", "Descripción"], tablefmt="fancy_grid", maxcolwidths=[None, 70]))
        stream.write("\n")
        return EXIT_CODES["ok"]
    if name not in MODELS:
        stream.write(f"Modelo desconocido: {name}. Opciones: {', '.join(MODELS)}\n")
        return EXIT_CODES["input_error"]
    info = MODELS[name]
    rows = [
        ["Descripción", info["description"]],
        ["Para qué sirve", info["purpose"]],
        ["Datos requeridos", "\n".join(info["required_inputs"])],
        ["Ejemplo", info["example"]],
    ]
    stream.write(tabulate(rows, tablefmt="fancy_grid", maxcolwidths=[None, 70]))
    stream.write("\n")
    return EXIT_CODES["ok"]


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] == "modelos":
        return show_models(argv[1] if len(argv) > 1 else None)
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
