"""
Benchmark circuit and problem-graph generators

All generators are deterministic for fixed parameters and seed.
"""
from __future__ import annotations

import logging
import random
from typing import Optional

import networkx as nx

from .circuit import Circuit, CircuitBuilder, CircuitError, GateKind, ProblemGraph

GRAPH_KINDS = ('random', 'powerlaw')


def _check_bits(bits: str, length: int, what: str):
    if len(bits) != length or any(b not in '01' for b in bits):
        raise CircuitError(f"{what} must be a bitstring of length {length}, got '{bits}'")


def gen_bv(n: int, secret: str) -> Circuit:
    """Bernstein-Vazirani on n qubits; the ancilla is the last qubit"""
    if n < 2:
        raise CircuitError(f"BV needs at least 2 qubits, got {n}")
    _check_bits(secret, n - 1, 'secret')
    anc = n - 1
    b = CircuitBuilder(n, n - 1, name=f"bv_{n}")
    b.add(GateKind.X, [anc])
    for q in range(n):
        b.add(GateKind.H, [q])
    for i, bit in enumerate(secret):
        if bit == '1':
            b.add(GateKind.CX, [i, anc])
    for i in range(n - 1):
        b.add(GateKind.H, [i])
        b.add(GateKind.MEASURE, [i], [i])
    return b.build()


def gen_cc(n: int, false_coin: Optional[int] = None) -> Circuit:
    """Counterfeit-coin parity query: n-1 coins in superposition weighed on the ancilla"""
    if n < 2:
        raise CircuitError(f"CC needs at least 2 qubits, got {n}")
    coins, anc = n - 1, n - 1
    false_coin = coins // 2 if false_coin is None else false_coin
    if not 0 <= false_coin < coins:
        raise CircuitError(f"false coin index {false_coin} out of range for {coins} coins")
    b = CircuitBuilder(n, n, name=f"cc_{n}")
    for q in range(coins):
        b.add(GateKind.H, [q])
    for q in range(coins):
        b.add(GateKind.CX, [q, anc])
    b.add(GateKind.MEASURE, [anc], [anc])
    # phase mark on the false coin before the final interference
    b.add(GateKind.Z, [false_coin])
    for q in range(coins):
        b.add(GateKind.H, [q])
        b.add(GateKind.MEASURE, [q], [q])
    return b.build()


def gen_xor(n: int, inputs: Optional[str] = None) -> Circuit:
    """XOR of n-1 input bits into the last qubit"""
    if n < 2:
        raise CircuitError(f"XOR needs at least 2 qubits, got {n}")
    inputs = inputs if inputs is not None else ('10' * n)[:n - 1]
    _check_bits(inputs, n - 1, 'inputs')
    out = n - 1
    b = CircuitBuilder(n, n, name=f"xor_{n}")
    for i, bit in enumerate(inputs):
        if bit == '1':
            b.add(GateKind.X, [i])
    for i in range(n - 1):
        b.add(GateKind.CX, [i, out])
    for q in range(n):
        b.add(GateKind.MEASURE, [q], [q])
    return b.build()


def gen_problem_graph(n: int, density: float, kind: str = 'random', seed: int = 0) -> ProblemGraph:
    """Random (G(n, m)) or power-law (preferential attachment) max-cut graph"""
    if n < 2:
        raise CircuitError(f"problem graph needs at least 2 vertices, got {n}")
    if not 0 < density <= 1:
        raise CircuitError(f"density must lie in (0, 1], got {density}")
    if kind not in GRAPH_KINDS:
        raise CircuitError(f"unknown graph kind '{kind}', expected one of {GRAPH_KINDS}")
    pairs = n * (n - 1) // 2
    target = round(density * pairs)
    if target < 1:
        raise CircuitError(f"density {density} gives no edges on {n} vertices")

    if kind == 'random':
        g = nx.gnm_random_graph(n, target, seed=seed)
    else:
        g = _powerlaw_graph(n, target, seed)
    logging.debug(f"Generated {kind} graph n={n} m={g.number_of_edges()} seed={seed}")
    return ProblemGraph(n=n, edges=frozenset(g.edges()), kind=kind, density=density, seed=seed)


def _powerlaw_graph(n: int, target: int, seed: int) -> nx.Graph:
    rng = random.Random(seed)
    m = max(1, min(n - 1, target // (4 * n)))
    g = nx.barabasi_albert_graph(n, m, seed=seed)

    # degree-biased additions keep the tail heavy
    while g.number_of_edges() < target:
        missing = [(u, v) for u in range(n) for v in range(u + 1, n) if not g.has_edge(u, v)]
        weights = [(g.degree(u) + 1) * (g.degree(v) + 1) for u, v in missing]
        g.add_edge(*rng.choices(missing, weights=weights, k=1)[0])

    while g.number_of_edges() > target:
        edges = sorted(g.edges())
        weights = [1.0 / ((g.degree(u)) * (g.degree(v))) for u, v in edges]
        g.remove_edge(*rng.choices(edges, weights=weights, k=1)[0])
    return g


def gen_qaoa_maxcut(graph: ProblemGraph, gamma: float, beta: float) -> Circuit:
    """One QAOA max-cut layer with the ZZ phases in a single commuting group

    exp(-i gamma (1 - Z_u Z_v) / 2) is, up to global phase, CP(2 gamma) on the
    edge plus RZ(-gamma) on each endpoint; the RZ terms are merged per vertex.
    """
    n = graph.n
    degree = {v: 0 for v in range(n)}
    for u, v in graph.edges:
        degree[u] += 1
        degree[v] += 1

    b = CircuitBuilder(n, n, name=f"qaoa_{n}_{graph.kind}")
    for q in range(n):
        b.add(GateKind.H, [q])
    for q in range(n):
        if degree[q]:
            b.add(GateKind.RZ, [q], params=[-gamma * degree[q]])
    for u, v in graph.sorted_edges():
        b.add(GateKind.CP, [u, v], params=[2.0 * gamma], commuting_group=0)
    for q in range(n):
        b.add(GateKind.RX, [q], params=[2.0 * beta])
    for q in range(n):
        b.add(GateKind.MEASURE, [q], [q])
    return b.build()


def gen_random_circuit(num_qubits: int, num_gates: int, seed: int = 0, two_qubit_ratio: float = 0.4) -> Circuit:
    """Random gates over the unitary GateKind set, then measure every qubit"""
    if num_qubits < 1:
        raise CircuitError("random circuit needs at least one qubit")
    rng = random.Random(seed)
    single = [GateKind.H, GateKind.X, GateKind.Z, GateKind.SX, GateKind.T, GateKind.RZ, GateKind.RX]
    double = [GateKind.CX, GateKind.CZ, GateKind.CP]
    b = CircuitBuilder(num_qubits, num_qubits, name=f"random_{num_qubits}_{seed}")
    for _ in range(num_gates):
        if num_qubits > 1 and rng.random() < two_qubit_ratio:
            kind = rng.choice(double)
            qubits = rng.sample(range(num_qubits), 2)
        else:
            kind = rng.choice(single)
            qubits = [rng.randrange(num_qubits)]
        params = [round(rng.uniform(-3.14, 3.14), 3)] if kind.num_params else []
        b.add(kind, qubits, params=params)
    for q in range(num_qubits):
        b.add(GateKind.MEASURE, [q], [q])
    return b.build()
