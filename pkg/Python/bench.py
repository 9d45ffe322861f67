import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path
from typing import Optional, Tuple

import pandas as pd

from Python.atom_engine import EngineConfig, EngineInvariantError, TimeLimitExceeded, TopologyCapReached, embed
from Python.embedding_core import load_embedding, min_enclosing_topology, qubit_count, verify
from Python.logical_graph import generate

logger = logging.getLogger(__name__)

# Barrido de escritorio: 3 modelos x 3 tamaños x 2 grados x 3 semillas
DEFAULT_SWEEP = {
    "models": ("ba_star", "ba_complete", "regular"),
    "sizes": (100, 200, 400),
    "degrees": (10, 20),
    "seed_list": (0, 1, 2),
    "time_limit": 300.0,
    "shore": 4,
    "k": None,
    "max_topology": None,
}

CSV_COLUMNS = [
    "model", "n", "d", "seed", "feasible", "reason", "seconds", "qubits",
    "topo_n", "topo_m", "topo_c", "min_n", "min_m", "iterations", "expansions",
    "max_chain", "shore", "k", "time_limit", "cap",
]


@dataclass(frozen=True)
class BenchCase:
    model: str
    num_nodes: int
    d: int
    seed: int
    shore: int = 4
    k: Optional[int] = None
    max_topology: Optional[Tuple[int, int]] = None
    time_limit: float = 300.0

    @property
    def key(self):
        return (self.model, self.num_nodes, self.d, self.seed)

    def config(self):
        return EngineConfig(shore=self.shore, k=self.k, max_topology=self.max_topology,
                            seed=self.seed, time_limit=self.time_limit)


@dataclass
class BenchRecord:
    case: BenchCase
    feasible: bool
    reason: str = ""
    wall_time: float = 0.0
    qubits: Optional[int] = None
    topology: Optional[tuple] = None
    min_topology: Optional[tuple] = None
    iterations: Optional[int] = None
    expansions: Optional[int] = None
    max_chain: Optional[int] = None

    def to_row(self):
        topo = self.topology or (None, None, None)
        min_topo = self.min_topology or (None, None, None)
        cap = self.case.max_topology
        return {
            "model": self.case.model,
            "n": self.case.num_nodes,
            "d": self.case.d,
            "seed": self.case.seed,
            "feasible": self.feasible,
            "reason": self.reason,
            "seconds": self.wall_time,
            "qubits": self.qubits,
            "topo_n": topo[0],
            "topo_m": topo[1],
            "topo_c": topo[2],
            "min_n": min_topo[0],
            "min_m": min_topo[1],
            "iterations": self.iterations,
            "expansions": self.expansions,
            "max_chain": self.max_chain,
            "shore": self.case.shore,
            "k": self.case.k,
            "time_limit": self.case.time_limit,
            "cap": f"{cap[0]}x{cap[1]}" if cap else "",
        }

    @classmethod
    def from_row(cls, row):
        cap = row.get("cap") or ""
        case = BenchCase(
            model=row["model"], num_nodes=int(row["n"]), d=int(row["d"]), seed=int(row["seed"]),
            shore=int(row["shore"]), k=None if row.get("k") is None else int(row["k"]),
            max_topology=tuple(int(t) for t in cap.split("x")) if cap else None,
            time_limit=float(row["time_limit"]),
        )
        topology = None if row.get("topo_n") is None else (int(row["topo_n"]), int(row["topo_m"]), int(row["topo_c"]))
        min_topology = None if row.get("min_n") is None else (int(row["min_n"]), int(row["min_m"]), int(row["topo_c"]))
        return cls(
            case=case, feasible=bool(row["feasible"]), reason=row.get("reason", ""),
            wall_time=float(row["seconds"]), qubits=row.get("qubits"), topology=topology,
            min_topology=min_topology, iterations=row.get("iterations"),
            expansions=row.get("expansions"), max_chain=row.get("max_chain"),
        )

    @property
    def is_failure(self):
        """Fallo real del motor o del verificador (los tiempos agotados no cuentan)."""
        return self.reason == "verification-failed" or self.reason.startswith("invariant:")

    def without_time(self):
        row = self.to_row()
        row.pop("seconds")
        return row


# --- Ejecución -----------------------------------------------------------------

def run_case(case):
    """Ejecuta un caso aislado; nunca lanza: los fallos quedan en el registro."""
    start = time.perf_counter()
    try:
        P = generate(case.model, case.num_nodes, case.d, case.seed)
        emb, report = embed(P, case.config())
    except TimeLimitExceeded:
        logger.warning("Caso %s: tiempo límite de %s s agotado", case.key, case.time_limit)
        return BenchRecord(case, False, "timeout", wall_time=time.perf_counter() - start)
    except TopologyCapReached as e:
        logger.warning("Caso %s: %s", case.key, e)
        return BenchRecord(case, False, "cap", wall_time=time.perf_counter() - start)
    except ValueError as e:
        logger.warning("Caso %s: error %s", case.key, e)
        return BenchRecord(case, False, f"error: {e}", wall_time=time.perf_counter() - start)
    except EngineInvariantError as e:
        logger.error("Caso %s: invariante violado: %s", case.key, e)
        return BenchRecord(case, False, f"invariant: {e}", wall_time=time.perf_counter() - start)

    # Ningún registro se marca factible sin pasar el verificador
    check = verify(P, emb)
    record = BenchRecord(
        case,
        feasible=check.feasible,
        reason="" if check.feasible else "verification-failed",
        wall_time=report.wall_time,
        qubits=report.qubits_used,
        topology=report.topology,
        min_topology=report.min_enclosing_topology,
        iterations=report.iterations,
        expansions=report.expansions,
        max_chain=report.max_chain_length,
    )
    if not check.feasible:
        logger.warning("Caso %s: %s", case.key, check.summary())
    else:
        logger.info("Caso %s: %d qubits en T(%d,%d,%d), %.3f s", case.key, record.qubits, *record.topology, record.wall_time)
    return record


def run_sweep(cases, parallelism=1):
    """Ejecuta todos los casos (en paralelo si parallelism > 1); registros ordenados por clave."""
    cases = list(cases)
    if parallelism > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(run_case, cases))
    else:
        records = [run_case(case) for case in cases]
    return sorted(records, key=lambda r: r.case.key)


def default_sweep():
    return build_cases(DEFAULT_SWEEP)


def build_cases(spec):
    return [
        BenchCase(model, n, d, seed, shore=spec["shore"], k=spec["k"],
                  max_topology=spec["max_topology"], time_limit=spec["time_limit"])
        for model, n, d, seed in product(spec["models"], spec["sizes"], spec["degrees"], spec["seed_list"])
    ]


def _int_list(value):
    return tuple(int(v) for v in value.split(",") if v.strip())


def parse_sweep_spec(text):
    """
    Lee un barrido en formato clave=valor (una por línea, '#' para comentarios).

    Claves: models, sizes, degrees, seeds (cantidad), seed_list, time_limit,
    shore, k, max_topology (NxM).
    """
    spec = dict(DEFAULT_SWEEP)
    parsers = {
        "models": lambda v: tuple(m.strip() for m in v.split(",") if m.strip()),
        "sizes": _int_list,
        "degrees": _int_list,
        "seeds": lambda v: tuple(range(int(v))),
        "seed_list": _int_list,
        "time_limit": float,
        "shore": int,
        "k": lambda v: None if v.lower() in ("", "none") else int(v),
        "max_topology": lambda v: None if v.lower() in ("", "none") else tuple(int(t) for t in v.lower().split("x")),
    }
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"Línea {lineno}: se esperaba 'clave=valor', se obtuvo {line!r}.")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in parsers:
            raise ValueError(f"Línea {lineno}: clave desconocida {key!r}.")
        try:
            parsed = parsers[key](value)
        except ValueError:
            raise ValueError(f"Línea {lineno}: valor inválido para {key}: {value!r}.") from None
        spec["seed_list" if key == "seeds" else key] = parsed
    unknown = [m for m in spec["models"] if m not in DEFAULT_SWEEP["models"]]
    if unknown:
        raise ValueError(f"Modelos desconocidos: {unknown}.")
    if spec["max_topology"] is not None and len(spec["max_topology"]) != 2:
        raise ValueError("max_topology debe tener la forma NxM.")
    return build_cases(spec)


def load_sweep_spec(path):
    return parse_sweep_spec(Path(path).read_text())


# --- Salidas -------------------------------------------------------------------

def emit_csv(records, path):
    if not records:
        raise ValueError("No hay registros para escribir.")
    df = pd.DataFrame([r.to_row() for r in records], columns=CSV_COLUMNS)
    df.to_csv(path, index=False)


def emit_json(records, path):
    if not records:
        raise ValueError("No hay registros para escribir.")
    Path(path).write_text(json.dumps([r.to_row() for r in records], indent=2) + "\n")


def load_json(path):
    return [BenchRecord.from_row(row) for row in json.loads(Path(path).read_text())]


def summarize(records):
    """Medianas de tiempo y qubits por (modelo, n, d) sobre los casos factibles."""
    df = pd.DataFrame([r.to_row() for r in records], columns=CSV_COLUMNS)
    df = df[df["feasible"]]
    if df.empty:
        return pd.DataFrame(columns=["model", "n", "d", "seconds", "qubits"])
    df = df.astype({"qubits": float})
    return df.groupby(["model", "n", "d"])[["seconds", "qubits"]].median().reset_index()


# --- Embebidos externos --------------------------------------------------------

@dataclass
class ExternalReport:
    feasibility: object
    qubits: int
    topology: tuple
    min_topology: tuple

    @property
    def feasible(self):
        return self.feasibility.feasible


def import_external_embedding(path, P, T=None):
    """Verifica y mide un embebido producido por otra herramienta (formato JSON propio)."""
    emb = load_embedding(path, expected_topology=T)
    return ExternalReport(
        feasibility=verify(P, emb),
        qubits=qubit_count(emb),
        topology=emb.topology.shape,
        min_topology=min_enclosing_topology(emb),
    )


# --- Barrido de tamaño de hardware ---------------------------------------------

def hardware_size_sweep(P, sizes, config=None):
    """ATOM limitado a T(s, s, c) para cada s; indica en qué tamaños hay embebido factible."""
    config = config or EngineConfig()
    rows = []
    for s in sizes:
        capped = replace(config, max_topology=(s, s))
        try:
            emb, report = embed(P, capped)
            feasible = verify(P, emb).feasible
            rows.append({"size": s, "feasible": feasible, "qubits": report.qubits_used,
                         "seconds": report.wall_time, "reason": "" if feasible else "verification-failed"})
        except TopologyCapReached:
            rows.append({"size": s, "feasible": False, "qubits": None, "seconds": None, "reason": "cap"})
        except TimeLimitExceeded:
            rows.append({"size": s, "feasible": False, "qubits": None, "seconds": None, "reason": "timeout"})
    return rows


def min_hardware_size(P, sizes, config=None):
    for row in hardware_size_sweep(P, sorted(sizes), config):
        if row["feasible"]:
            return row["size"]
    return None
