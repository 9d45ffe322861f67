import logging
import sys

from tabulate import tabulate


def setup_logging(verbose=False):
    """Configura un único handler a stderr; stdout queda libre para las líneas clave=valor."""
    logger = logging.getLogger("Python")
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    handler.setFormatter(logging.Formatter('%(asctime)s [%(levelname)s] %(message)s', datefmt='%H:%M:%S'))
    logger.addHandler(handler)
    logger.propagate = False
    return logger


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, (tuple, list)):
        return "x".join(str(v) for v in value)
    return str(value)


def emit_key_values(pairs, stream=None):
    """Escribe pares clave=valor, uno por línea (salida legible por máquinas)."""
    stream = stream or sys.stdout
    for key, value in pairs:
        stream.write(f"{key}={format_value(value)}\n")
    stream.flush()


def show_results_table(title, headers, rows, stream=None):
    """Tabla legible para humanos (a stderr por defecto)."""
    stream = stream or sys.stderr
    safe_rows = [[format_value(item) if isinstance(item, (tuple, list, bool)) else item for item in r] for r in rows]
    stream.write(f"\n{title}\n")
    stream.write(tabulate(safe_rows, headers=headers, tablefmt="fancy_grid"))
    stream.write("\n")
    stream.flush()


def embed_report_rows(report):
    return [
        ["Topología adaptativa final", "T({},{},{})".format(*report.topology)],
        ["Topología mínima usada", "T({},{},{})".format(*report.min_enclosing_topology)],
        ["Qubits usados", report.qubits_used],
        ["Cadena más larga", report.max_chain_length],
        ["Iteraciones", f"{report.iterations} (cota 3|V_P| = {3 * report.num_nodes})"],
        ["Turnos", report.turns],
        ["Expansiones", report.expansions],
        ["Tiempo (s)", f"{report.wall_time:.6f}"],
    ]


def violation_rows(report):
    return [[v.kind, list(v.nodes), v.witness] for v in report.violations]
