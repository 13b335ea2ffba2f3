"""
Command-line entry point

Exit codes: 0 success, 1 input or validation error (or a failed equivalence
check), 2 qubit budget cannot be met.
"""
import argparse
import json
import logging
import pathlib
import sys
from typing import List, Optional

from .circuit import CaqrError, Circuit, InfeasibleError
from .config import (
    DEFAULT_BETA, DEFAULT_GAMMA, DEFAULT_OUT_DIR, DEFAULT_SEED, LOG_FORMAT, LOG_LEVEL, SERVER_HOST, SERVER_PORT,
)
from .dag import dag_to_dot
from .generators import GRAPH_KINDS, gen_bv, gen_cc, gen_problem_graph, gen_qaoa_maxcut, gen_random_circuit, gen_xor
from .pipeline import RunConfig, compare_circuits, parse_qubit_range, transpile
from .qasm import emit_qasm, parse_qasm
from .qs_caqr import OBJECTIVES, Infeasible, sweep
from .reports import benchmark_corpus, benchmark_tables, sweep_frame, tradeoff_figure
from .reuse import WireMap
from .simulator import sample_shots, simulate_exact

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _read_circuit(path: str) -> Circuit:
    path = pathlib.Path(path)
    return parse_qasm(path.read_text(encoding='utf-8'), name=path.stem)


def _out_dir(args) -> pathlib.Path:
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: pathlib.Path, text: str):
    path.write_text(text, encoding='utf-8')
    logging.info(f"Wrote {path}")
    print(path)


def _run_config(args) -> RunConfig:
    return RunConfig(
        mode=args.mode,
        qubit_limit=args.qubit_limit,
        qubit_range=parse_qubit_range(args.qubit_range) if args.qubit_range else None,
        objective=args.objective,
        arch=args.arch,
        builtin_reset=args.builtin_reset,
        shots=args.shots,
        seed=args.seed,
    )


def cmd_generate(args) -> int:
    out = _out_dir(args)
    if args.kind in ('graph', 'qaoa'):
        graph = gen_problem_graph(args.n, args.density, args.graph_kind, args.seed)
        if args.kind == 'graph':
            _write(out / f"graph_{args.n}_{args.graph_kind}_s{args.seed}.json",
                   json.dumps(graph.to_json(), indent=2) + '\n')
            return EXIT_OK
        circuit = gen_qaoa_maxcut(graph, args.gamma, args.beta)
        stem = f"{circuit.name}_s{args.seed}"
        _write(out / f"{stem}.json", json.dumps(graph.to_json(), indent=2) + '\n')
    elif args.kind == 'bv':
        circuit = gen_bv(args.n, args.secret if args.secret is not None else '1' * (args.n - 1))
        stem = circuit.name
    elif args.kind == 'cc':
        circuit = gen_cc(args.n, args.false_coin)
        stem = circuit.name
    elif args.kind == 'xor':
        circuit = gen_xor(args.n, args.inputs)
        stem = circuit.name
    else:
        circuit = gen_random_circuit(args.n, args.gates, args.seed)
        stem = circuit.name
    _write(out / f"{stem}.qasm", emit_qasm(circuit))
    return EXIT_OK


def cmd_transpile(args) -> int:
    circuit = _read_circuit(args.input)
    cfg = _run_config(args)
    outcome = transpile(circuit, cfg)
    if isinstance(outcome, Infeasible):
        logging.error(f"Transpile of '{circuit.name}' failed: {outcome}")
        print(f"infeasible: {outcome}", file=sys.stderr)
        return EXIT_INFEASIBLE

    out = _out_dir(args)
    stem = f"{circuit.name}_{cfg.mode}"
    _write(out / f"{stem}.qasm", emit_qasm(outcome.circuit))
    _write(out / f"{stem}.json", json.dumps(outcome.report, indent=2) + '\n')
    if args.emit_dag:
        _write(pathlib.Path(args.emit_dag), dag_to_dot(outcome.dag(circuit, cfg.durations(cfg.hardware()))))
    if outcome.report.get('violations'):
        return EXIT_ERROR
    return EXIT_OK


def cmd_sweep(args) -> int:
    circuit = _read_circuit(args.input)
    cfg = RunConfig(arch=args.arch, builtin_reset=args.builtin_reset)
    hardware = cfg.hardware()
    coupling, calibration = hardware if hardware else (None, None)
    points = sweep(circuit, cfg.durations(hardware), coupling, calibration)

    out = _out_dir(args)
    path = out / f"{circuit.name}_sweep.csv"
    sweep_frame(points).to_csv(path, index=False)
    logging.info(f"Wrote {path}")
    print(path)
    if args.html:
        html = out / f"{circuit.name}_sweep.html"
        tradeoff_figure(points, title=f"{circuit.name} qubit saving tradeoff").write_html(str(html))
        print(html)
    return EXIT_OK


def cmd_simulate(args) -> int:
    circuit = _read_circuit(args.input)
    if args.other is None:
        dist = simulate_exact(circuit)
        print(json.dumps(dist.to_json(), indent=2))
        if args.shots:
            print(json.dumps(sample_shots(dist, args.shots, args.seed), indent=2))
        return EXIT_OK

    other = _read_circuit(args.other)
    wire_map = None
    if args.wire_map:
        report = json.loads(pathlib.Path(args.wire_map).read_text(encoding='utf-8'))
        wire_map = WireMap.from_json(report.get('wire_map', report), circuit.num_clbits)
    comparison = compare_circuits(circuit, other, wire_map)
    result = 'PASS' if comparison.passed else 'FAIL'
    print(f"TVD {comparison.tvd:.3e} {result}")
    return EXIT_OK if comparison.passed else EXIT_ERROR


def cmd_report(args) -> int:
    cfg = RunConfig(arch=args.arch, builtin_reset=args.builtin_reset)
    coupling, calibration = cfg.hardware()
    corpus = benchmark_corpus(args.seed, pathlib.Path(args.corpus) if args.corpus else None)
    qs_table, sr_table = benchmark_tables(corpus, coupling, calibration)

    out = _out_dir(args)
    for name, table in (('qs_table', qs_table), ('sr_table', sr_table)):
        path = out / f"{name}.csv"
        table.to_csv(path, index=False)
        print(path)
    print(sr_table.to_string(index=False))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn
    uvicorn.run('caqr.server:app', host=args.host, port=args.port)
    return EXIT_OK


def _add_hardware_flags(p: argparse.ArgumentParser):
    p.add_argument('--arch', help='heavy-hex-27, heavy-hex-65, heavy-hex-127 or an architecture JSON path')
    p.add_argument('--builtin-reset', action='store_true', help='model measure + built-in reset')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='caqr', description='Qubit-reuse transpiler')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', default=str(DEFAULT_OUT_DIR), help='output directory')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', parents=[common], help='generate benchmark circuits or problem graphs')
    gen.add_argument('kind', choices=['bv', 'qaoa', 'graph', 'cc', 'xor', 'random'])
    gen.add_argument('--n', type=int, required=True)
    gen.add_argument('--secret')
    gen.add_argument('--false-coin', type=int)
    gen.add_argument('--inputs')
    gen.add_argument('--density', type=float, default=0.3)
    gen.add_argument('--graph-kind', choices=GRAPH_KINDS, default='random')
    gen.add_argument('--gamma', type=float, default=DEFAULT_GAMMA)
    gen.add_argument('--beta', type=float, default=DEFAULT_BETA)
    gen.add_argument('--gates', type=int, default=20)
    gen.add_argument('--seed', type=int, default=DEFAULT_SEED)
    gen.set_defaults(func=cmd_generate)

    tr = sub.add_parser('transpile', parents=[common], help='reduce qubits (qs) or map with reuse (sr)')
    tr.add_argument('input')
    tr.add_argument('--mode', choices=['qs', 'sr'], default='qs')
    tr.add_argument('--qubit-limit', type=int)
    tr.add_argument('--qubit-range', help='LO:HI, pick the best sweep point inside it')
    tr.add_argument('--objective', choices=OBJECTIVES, default='duration')
    tr.add_argument('--seed', type=int, default=DEFAULT_SEED)
    tr.add_argument('--shots', type=int, help='sample the transpiled circuit, seeded by --seed')
    tr.add_argument('--emit-dag', metavar='FILE', help='write the dependency DAG as DOT')
    _add_hardware_flags(tr)
    tr.set_defaults(func=cmd_transpile)

    sw = sub.add_parser('sweep', parents=[common], help='qubit count vs depth/duration tradeoff CSV')
    sw.add_argument('input')
    sw.add_argument('--html', action='store_true', help='also write the tradeoff chart')
    _add_hardware_flags(sw)
    sw.set_defaults(func=cmd_sweep)

    sim = sub.add_parser('simulate', parents=[common], help='exact distribution, or equivalence of two circuits')
    sim.add_argument('input')
    sim.add_argument('other', nargs='?')
    sim.add_argument('--wire-map', metavar='JSON', help='transform report carrying the wire map')
    sim.add_argument('--shots', type=int)
    sim.add_argument('--seed', type=int, default=DEFAULT_SEED)
    sim.set_defaults(func=cmd_simulate)

    rep = sub.add_parser('report', parents=[common], help='QS and SR benchmark tables')
    rep.add_argument('--corpus', metavar='DIR', help='extra *.qasm benchmarks')
    rep.add_argument('--seed', type=int, default=DEFAULT_SEED)
    rep.add_argument('--arch', default='heavy-hex-27')
    rep.add_argument('--builtin-reset', action='store_true')
    rep.set_defaults(func=cmd_report)

    srv = sub.add_parser('serve', parents=[common], help='run the HTTP service')
    srv.add_argument('--host', default=SERVER_HOST)
    srv.add_argument('--port', type=int, default=SERVER_PORT)
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as e:
        logging.error(f"{args.command} failed: {e}")
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CaqrError, OSError) as e:
        logging.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
