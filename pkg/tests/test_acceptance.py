"""End-to-end checks over the benchmark families"""
import logging
import random

import networkx as nx
import pytest

from caqr.coloring import color_interaction_graph
from caqr.dag import build_dag
from caqr.generators import gen_bv, gen_cc, gen_problem_graph, gen_qaoa_maxcut, gen_random_circuit, gen_xor
from caqr.metrics import total_variation_distance
from caqr.pipeline import RunConfig, compare_circuits, sr_min_swap, transpile
from caqr.qs_caqr import select_point, sweep
from caqr.reports import benchmark_corpus
from caqr.reuse import apply_reuse_pair, enumerate_candidates, materialize
from caqr.simulator import simulate_exact
from caqr.sr_caqr import map_regular, verify_mapping

from conftest import QAOA5_EDGES


def k_colorable(graph, k):
    order = sorted(graph.nodes, key=graph.degree, reverse=True)
    color = {}

    def place(i):
        if i == len(order):
            return True
        v = order[i]
        used = {color[u] for u in graph.neighbors(v) if u in color}
        for c in range(k):
            if c not in used:
                color[v] = c
                if place(i + 1):
                    return True
                del color[v]
        return False

    return place(0)


def chromatic_number(graph):
    if graph.number_of_edges() == 0:
        return min(graph.number_of_nodes(), 1)
    k = 2
    while not k_colorable(graph, k):
        k += 1
    return k


@pytest.mark.parametrize('n', [5, 10, 20])
def test_bv_compresses_to_two_wires_without_swaps(n):
    outcome = transpile(gen_bv(n, '1' * (n - 1)), RunConfig(qubit_limit=2))
    assert outcome.circuit.num_qubits == 2
    mapped = transpile(gen_bv(n, '1' * (n - 1)), RunConfig(mode='sr', arch='heavy-hex-27', qubit_limit=2))
    assert mapped.mapped.swaps == 0


@pytest.mark.parametrize('circuit', [
    gen_bv(5, '1111'), gen_bv(8, '1010101'), gen_cc(6), gen_xor(5),
    gen_qaoa_maxcut(gen_problem_graph(6, 0.4, 'random', 1), 0.7, 0.4),
], ids=['bv5', 'bv8', 'cc6', 'xor5', 'qaoa6'])
def test_every_sweep_point_is_equivalent(circuit):
    for point in sweep(circuit):
        assert compare_circuits(circuit, point.result.circuit, point.result.wire_map).passed


def test_random_reuse_chains_keep_the_distribution():
    rng = random.Random(2024)
    for case in range(200):
        n = rng.randint(5, 7)
        circuit = gen_random_circuit(n, rng.randint(4, 20), seed=case, two_qubit_ratio=0.3)
        dag = build_dag(circuit)
        for _ in range(rng.randint(1, n - 1)):
            candidates = enumerate_candidates(circuit, dag)
            if not candidates:
                break
            dag = apply_reuse_pair(dag, rng.choice(candidates))
        wired, wire_map = materialize(circuit, dag.pairs, dag)
        transformed = simulate_exact(wired, wire_map.scratch, output_clbits=circuit.num_clbits)
        assert total_variation_distance(simulate_exact(circuit), transformed) <= 1e-9, circuit.name


def test_coloring_is_exact_on_small_graphs():
    rng = random.Random(7)
    for i in range(50):
        g = nx.gnp_random_graph(rng.randint(1, 10), rng.uniform(0.2, 0.8), seed=i)
        assert color_interaction_graph(g).num_colors == chromatic_number(g)


def test_five_vertex_instance_needs_three_colors():
    g = nx.Graph(QAOA5_EDGES)
    assert color_interaction_graph(g).num_colors == chromatic_number(g) == 3


def test_star_needs_reuse_to_avoid_swaps(bv5):
    cfg = RunConfig(mode='sr', arch='heavy-hex-27')
    coupling, calibration = cfg.hardware()
    assert transpile(bv5, cfg).mapped.swaps == 0
    baseline = transpile(bv5, RunConfig(arch='heavy-hex-27', qubit_limit=5))
    assert baseline.mapped.swaps >= 1
    assert verify_mapping(map_regular(bv5, coupling, calibration), coupling) == []


@pytest.mark.slow
def test_sr_beats_qs_swaps_on_the_corpus():
    coupling, calibration = RunConfig(arch='heavy-hex-27').hardware()
    for name, circuit in benchmark_corpus().items():
        points = sweep(circuit, coupling=coupling, calibration=calibration)
        mapped = sr_min_swap(circuit, coupling, calibration, points)
        assert verify_mapping(mapped, coupling) == [], name
        assert mapped.swaps <= select_point(points, 'swaps').swaps, name


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(5))
def test_heavy_tailed_qaoa_saves_half_the_qubits(seed):
    circuit = gen_qaoa_maxcut(gen_problem_graph(64, 0.3, 'powerlaw', seed), 0.7, 0.4)
    points = sweep(circuit)
    assert points[-1].qubits <= 32
    baseline = points[0].duration
    deep = [p for p in points if p.qubits <= 64 * 0.2]
    if deep:
        logging.info(f"seed {seed}: duration ratio {max(deep, key=lambda p: p.qubits).duration / baseline:.2f} "
                     f"at {max(p.qubits for p in deep)} qubits")
