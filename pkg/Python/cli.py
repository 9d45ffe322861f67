import argparse
import json
import logging
import sys
from pathlib import Path

from Python import bench
from Python.atom_engine import EngineConfig, TimeLimitExceeded, TopologyCapReached, embed
from Python.embedding_core import (
    EmbeddingFormatError,
    TopologyMismatchError,
    load_embedding,
    min_enclosing_topology,
    qubit_count,
    save_embedding,
    verify,
)
from Python.logical_graph import GENERATORS, generate, load_edge_list, save_edge_list
from Python.report_helpers import (
    embed_report_rows,
    emit_key_values,
    setup_logging,
    show_results_table,
    violation_rows,
)

logger = logging.getLogger(__name__)

EXIT_CODES = {
    "ok": 0,
    "infeasible": 1,
    "timeout": 2,
    "input_error": 3,
}


def _size_pair(text):
    try:
        n, m = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"se esperaba NxM, se obtuvo {text!r}") from None
    if n < 1 or m < 1:
        raise argparse.ArgumentTypeError("N y M deben ser positivos")
    return (n, m)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="CLI.py",
        description="ATOM: embebido menor con topología adaptativa sobre Chimera.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="genera un grafo lógico y lo guarda como lista de aristas")
    gen.add_argument("--model", required=True, choices=sorted(GENERATORS))
    gen.add_argument("--nodes", required=True, type=int)
    gen.add_argument("--degree", required=True, type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    emb = sub.add_parser("embed", help="embebe un grafo con ATOM")
    emb.add_argument("--in", dest="input", required=True)
    emb.add_argument("--shore", type=int, default=4)
    emb.add_argument("--k", type=int, default=None)
    emb.add_argument("--initial-topology", type=_size_pair, default=None)
    emb.add_argument("--max-topology", type=_size_pair, default=None)
    emb.add_argument("--time-limit", type=float, default=None)
    emb.add_argument("--split-degree", choices=["total", "residual"], default="total")
    emb.add_argument("--seed", type=int, default=0)
    emb.add_argument("--out-embedding", default=None)
    emb.add_argument("--out-report", default=None)

    ver = sub.add_parser("verify", help="verifica un embebido contra un grafo")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--embedding", required=True)

    ben = sub.add_parser("bench", help="ejecuta un barrido de casos")
    ben.add_argument("--sweep-spec", default=None)
    ben.add_argument("--parallel", type=int, default=1)
    ben.add_argument("--csv", default=None)
    ben.add_argument("--json", default=None)

    for p in (gen, emb, ver, ben):
        p.add_argument("--verbose", action="store_true")
    return parser


def cmd_gen(args):
    P = generate(args.model, args.nodes, args.degree, args.seed)
    save_edge_list(P, args.out)
    logger.info("Grafo %s guardado en %s", args.model, args.out)
    emit_key_values([("nodes", P.num_nodes), ("edges", P.num_edges)])
    return EXIT_CODES["ok"]


def cmd_embed(args):
    P = load_edge_list(args.input)
    config = EngineConfig(
        shore=args.shore, k=args.k, initial_topology=args.initial_topology,
        max_topology=args.max_topology, seed=args.seed, time_limit=args.time_limit,
        split_degree=args.split_degree,
    )
    try:
        emb, report = embed(P, config)
    except TimeLimitExceeded as e:
        logger.error("%s", e)
        emit_key_values([("status", "timeout")])
        return EXIT_CODES["timeout"]
    except TopologyCapReached as e:
        logger.error("%s", e)
        emit_key_values([("status", "infeasible-at-size")])
        return EXIT_CODES["infeasible"]

    # Se vuelve a verificar antes de escribir cualquier salida
    check = verify(P, emb)
    if not check.feasible:
        logger.error("%s", check.summary())
        show_results_table("Violaciones", ["Tipo", "Nodos", "Testigo"], violation_rows(check))
        emit_key_values([("status", "verification-failed")])
        return EXIT_CODES["infeasible"]

    if args.out_embedding:
        save_embedding(emb, args.out_embedding)
    if args.out_report:
        Path(args.out_report).write_text(json.dumps(report.to_dict(), indent=2) + "\n")

    show_results_table("Resultado ATOM", ["Propiedad", "Valor"], embed_report_rows(report))
    emit_key_values([
        ("status", "ok"),
        ("feasible", True),
        ("qubits", report.qubits_used),
        ("topology", report.topology),
        ("min_topology", report.min_enclosing_topology),
        ("seconds", report.wall_time),
        ("iterations", report.iterations),
        ("expansions", report.expansions),
    ])
    return EXIT_CODES["ok"]


def cmd_verify(args):
    P = load_edge_list(args.graph)
    emb = load_embedding(args.embedding)
    check = verify(P, emb)
    logger.info("%s", check.summary())
    if not check.feasible:
        show_results_table("Violaciones", ["Tipo", "Nodos", "Testigo"], violation_rows(check))
    pairs = [("feasible", check.feasible), ("qubits", qubit_count(emb)),
             ("topology", emb.topology.shape), ("min_topology", min_enclosing_topology(emb))]
    pairs.extend(("violation", str(v)) for v in check.violations)
    emit_key_values(pairs)
    return EXIT_CODES["ok"] if check.feasible else EXIT_CODES["infeasible"]


def cmd_bench(args):
    cases = bench.load_sweep_spec(args.sweep_spec) if args.sweep_spec else bench.default_sweep()
    logger.info("Barrido de %d casos con %d procesos", len(cases), args.parallel)
    records = bench.run_sweep(cases, parallelism=args.parallel)
    if args.csv:
        bench.emit_csv(records, args.csv)
    if args.json:
        bench.emit_json(records, args.json)

    summary = bench.summarize(records)
    if not summary.empty:
        show_results_table("Medianas por configuración", list(summary.columns), summary.values.tolist())
    failed = [r for r in records if r.is_failure]
    timeouts = [r for r in records if r.reason == "timeout"]
    emit_key_values([
        ("cases", len(records)),
        ("feasible", sum(r.feasible for r in records)),
        ("timeouts", len(timeouts)),
        ("verification_failures", sum(r.reason == "verification-failed" for r in records)),
        ("invariant_failures", sum(r.reason.startswith("invariant:") for r in records)),
    ])
    # Los tiempos agotados no cuentan como fallo
    return EXIT_CODES["infeasible"] if failed else EXIT_CODES["ok"]


COMMANDS = {
    "gen": cmd_gen,
    "embed": cmd_embed,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse usa 2 para errores de uso; aquí 2 significa tiempo agotado
        return EXIT_CODES["ok"] if e.code == 0 else EXIT_CODES["input_error"]
    setup_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (TopologyMismatchError, EmbeddingFormatError, ValueError, OSError) as e:
        logger.error("Entrada no válida: %s", e)
        emit_key_values([("status", "input-error")])
        return EXIT_CODES["input_error"]


if __name__ == "__main__":
    sys.exit(main())
