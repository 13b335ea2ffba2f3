"""
Gate dependency DAG with dummy measure-reset nodes
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx

from .circuit import Circuit, DagCycleError, GateKind, Instruction
from .hardware import DurationModel, Durations


@dataclass(frozen=True)
class DummyMR:
    producer: int
    consumer: int


@dataclass(frozen=True)
class DagNode:
    id: int
    payload: Union[int, DummyMR]

    @property
    def is_dummy(self) -> bool:
        return isinstance(self.payload, DummyMR)


class DependencyDag:
    """Dependency graph of a circuit plus the reuse pairs applied so far

    Instruction nodes use the instruction id as node id; dummy nodes take
    fresh ids above every instruction id. Treat instances as immutable:
    reuse-core returns a new DependencyDag for every applied pair.
    """

    def __init__(self, circuit: Circuit, graph: nx.DiGraph, durations: DurationModel,
                 node_weight: Dict[int, float], pairs: Tuple[Tuple[int, int], ...] = ()):
        self.circuit = circuit
        self.graph = graph
        self.durations = durations
        self.node_weight = node_weight
        self.pairs = tuple(pairs)
        self._by_id = {inst.id: inst for inst in circuit.instructions}
        self._qubit_nodes: Dict[int, List[int]] = {q: [] for q in range(circuit.num_qubits)}
        for inst in circuit.instructions:
            for q in inst.qubits:
                self._qubit_nodes[q].append(inst.id)

    @property
    def nodes(self) -> List[DagNode]:
        return [self.graph.nodes[n]['node'] for n in self.graph.nodes]

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return list(self.graph.edges)

    def node(self, node_id: int) -> DagNode:
        return self.graph.nodes[node_id]['node']

    def instruction(self, node_id: int) -> Optional[Instruction]:
        return self._by_id.get(node_id)

    def qubit_nodes(self, qubit: int) -> List[int]:
        """Instruction nodes acting on a logical qubit, in circuit order"""
        return self._qubit_nodes[qubit]

    def dummy_nodes(self) -> List[int]:
        return [n for n in self.graph.nodes if self.node(n).is_dummy]

    def next_dummy_id(self) -> int:
        return max(self.graph.nodes, default=-1) + 1

    def producers(self) -> Set[int]:
        return {p for p, _ in self.pairs}

    def consumers(self) -> Set[int]:
        return {c for _, c in self.pairs}

    def copy(self) -> 'DependencyDag':
        return DependencyDag(self.circuit, self.graph.copy(), self.durations, dict(self.node_weight), self.pairs)

    def __len__(self) -> int:
        return self.graph.number_of_nodes()


def fused_reset_ids(circuit: Circuit) -> Set[int]:
    """CX_CLASSICAL ids that directly follow a MEASURE of the same qubit into the same clbit"""
    last: Dict[int, Instruction] = {}
    fused = set()
    for inst in circuit.instructions:
        if inst.kind is GateKind.CX_CLASSICAL:
            prev = last.get(inst.qubit)
            if prev is not None and prev.kind is GateKind.MEASURE and prev.clbit == inst.clbit:
                fused.add(inst.id)
        for q in inst.qubits:
            last[q] = inst
    return fused


def instruction_weight(inst: Instruction, durations: DurationModel, fused: bool = False) -> float:
    kind = inst.kind
    if kind is GateKind.SWAP:
        return 3 * durations.two_qubit(*inst.qubits)
    if kind.is_two_qubit:
        return durations.two_qubit(*inst.qubits)
    if kind is GateKind.MEASURE:
        return durations.measure
    if kind is GateKind.RESET:
        return durations.mr
    if kind is GateKind.CX_CLASSICAL:
        # a fused MEASURE + CX_CLASSICAL costs one measure-reset in total
        return max(durations.mr - durations.measure, 0) if fused else durations.sq
    return durations.sq


def _ends_in_measure(dag: DependencyDag, qubit: int) -> bool:
    nodes = dag.qubit_nodes(qubit)
    return bool(nodes) and dag.instruction(nodes[-1]).kind is GateKind.MEASURE


def dummy_weight(dag: DependencyDag, producer: int, mr_duration: float, measure_duration: float) -> float:
    """Measure-reset cost of a dummy node; an absorbed final MEASURE already paid its part"""
    if _ends_in_measure(dag, producer):
        return max(mr_duration - measure_duration, 0)
    return mr_duration


def node_weights(dag: DependencyDag, durations: DurationModel) -> Dict[int, float]:
    fused = fused_reset_ids(dag.circuit)
    weights = {}
    for n in dag.graph.nodes:
        node = dag.node(n)
        if node.is_dummy:
            weights[n] = dummy_weight(dag, node.payload.producer, durations.mr, durations.measure)
        else:
            weights[n] = instruction_weight(dag.instruction(n), durations, n in fused)
    return weights


def unit_weights(dag: DependencyDag) -> Dict[int, float]:
    """One per layer element: fused resets count 0, SWAP counts 1"""
    weights = node_weights(dag, Durations.unit())
    for n, w in weights.items():
        inst = dag.instruction(n)
        if inst is not None and inst.kind is GateKind.SWAP:
            weights[n] = 1
    return weights


def build_dag(circuit: Circuit, durations: Optional[DurationModel] = None) -> DependencyDag:
    """Edges follow per-qubit order; members of one commuting group stay mutually unordered"""
    durations = durations or Durations()
    g = nx.DiGraph()
    # clbits order MEASURE / CX_CLASSICAL like extra wires
    frontier: Dict[tuple, List[int]] = {}
    base: Dict[tuple, List[int]] = {}
    group_on: Dict[tuple, Optional[int]] = {}

    for inst in circuit.instructions:
        g.add_node(inst.id, node=DagNode(inst.id, inst.id))
        group = inst.commuting_group
        for w in [('q', q) for q in inst.qubits] + [('c', c) for c in inst.clbits]:
            if group is None:
                g.add_edges_from((p, inst.id) for p in frontier.get(w, []))
                frontier[w] = [inst.id]
            else:
                if group_on.get(w) != group:
                    base[w] = frontier.get(w, [])
                    frontier[w] = []
                g.add_edges_from((p, inst.id) for p in base[w])
                frontier[w].append(inst.id)
            group_on[w] = group

    fused = fused_reset_ids(circuit)
    weights = {inst.id: instruction_weight(inst, durations, inst.id in fused) for inst in circuit.instructions}
    logging.debug(f"Built DAG for '{circuit.name}': {g.number_of_nodes()} nodes, {g.number_of_edges()} edges")
    return DependencyDag(circuit, g, durations, weights)


def detect_cycle(dag: Union[DependencyDag, nx.DiGraph]) -> bool:
    graph = dag.graph if isinstance(dag, DependencyDag) else dag
    return not nx.is_directed_acyclic_graph(graph)


def _longest(graph: nx.DiGraph, weights: Dict[int, float], order: Iterable[int], neighbours) -> Dict[int, float]:
    best: Dict[int, float] = {}
    for n in order:
        best[n] = weights[n] + max((best[m] for m in neighbours(n)), default=0)
    return best


def _topological(graph: nx.DiGraph) -> List[int]:
    try:
        return list(nx.topological_sort(graph))
    except nx.NetworkXUnfeasible as e:
        raise DagCycleError("dependency graph contains a cycle") from e


def critical_path_length(dag: Union[DependencyDag, nx.DiGraph], weights: Optional[Dict[int, float]] = None) -> float:
    """Largest sum of node weights over any path"""
    if isinstance(dag, DependencyDag):
        graph, weights = dag.graph, weights if weights is not None else dag.node_weight
    else:
        graph = dag
    if weights is None:
        weights = {n: 1 for n in graph.nodes}
    finish = _longest(graph, weights, _topological(graph), graph.predecessors)
    return max(finish.values(), default=0)


def path_profile(dag: DependencyDag, weights: Optional[Dict[int, float]] = None) -> Tuple[Dict[int, float], Dict[int, float]]:
    """(head, tail): longest weighted path ending at / starting from each node, inclusive"""
    weights = weights if weights is not None else dag.node_weight
    order = _topological(dag.graph)
    head = _longest(dag.graph, weights, order, dag.graph.predecessors)
    tail = _longest(dag.graph, weights, reversed(order), dag.graph.successors)
    return head, tail


def dag_to_dot(dag: DependencyDag) -> str:
    labelled = nx.DiGraph()
    for n in dag.graph.nodes:
        node = dag.node(n)
        if node.is_dummy:
            label = f"MR q{node.payload.producer}->q{node.payload.consumer}"
            labelled.add_node(n, label=f'"{label}"', shape='box')
        else:
            inst = dag.instruction(n)
            qubits = ','.join(f"q{q}" for q in inst.qubits)
            labelled.add_node(n, label=f'"{inst.kind.name} {qubits}"')
    labelled.add_edges_from(dag.graph.edges)
    return nx.nx_pydot.to_pydot(labelled).to_string()
